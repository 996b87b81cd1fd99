package demo;

import java.util.List;

final class TextUtils {
    static String join(List<String> parts, String sep) {
        StringBuilder sb = new StringBuilder();
        for (String part : parts) {
            if (sb.length() > 0) {
                sb.append(sep);
            }
            sb.append(part);
        }
        return sb.toString();
    }

    static boolean isBlank(String s) {
        return s == null || s.trim().isEmpty();
    }
}
