package org.example.arithexp;

import java.util.Map;

public interface ExpressionEvaluatorExternals {
    int strToInt(String s);
    int value(java.util.Map<String, Integer> env, String variable);
    int zero();
    int one();
    int neg(int x);
    int add(int x, int y);
    int mul(int x, int y);
}
