package demo;

import java.util.HashMap;
import java.util.Map;

public class Counters {
    private final Map<String, Integer> counts = new HashMap<>();

    public void bump(String key) {
        Integer old = counts.get(key);
        counts.put(key, old == null ? 1 : old + 1);
    }

    public int get(String key) {
        Integer value = counts.get(key);
        return value == null ? 0 : value;
    }
}
