# Copyright 2026 The eqtrack Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference computations for values frozen into the C++ tests.

Run with python3; prints every constant with 17 significant digits.
"""
import math

e = math.e

def logit_payoff(alpha, beta, n, p_own, p_other):
    a = math.exp(alpha - beta * p_own)
    b = math.exp(alpha - beta * p_other)
    return p_own * n * a / (1 + a + b)

print("example1 first half (2,2):", repr(logit_payoff(4, 0.75, 1, 2, 2)))
print("example1 second half (1,1):", repr(logit_payoff(4, 1.75, 1, 1, 1)))
for beta in (0.75, 1.75):
    for pi in (1, 2):
        for pj in (1, 2):
            print(f"  beta={beta} u1({pi},{pj}) =", repr(logit_payoff(4, beta, 1, pi, pj)))

T = 10**4
print("fig1 gamma T=1e4:", repr(math.sqrt(2 * math.log(2) / ((e - 1) * T))))
print("fig2 gamma T=1e4:", repr(math.sqrt(4 * math.log(T) / T)))

# Exp3P, Thm A.1 style parameters
T, K, S = 1024, 2, 1
s = S * math.log(3 * T * K / S) + 2 * math.log(K)
print("exp3p s:", repr(s))
print("exp3p beta:", repr(3 * math.sqrt(s / (T * K))))
print("exp3p eta:", repr(0.2 * math.sqrt(s / (T * K))))
print("exp3p gamma:", repr(min(0.5, math.sqrt(K * s / (2 * T)))))

# Rexp3P pulls with C_T = ceil(T^0.3) and K = 2
def budget(t):
    return math.ceil(t ** 0.3 - 1e-9)

for r in range(1, 7):
    big = min(budget(2 ** r - 1) + 1, 2 ** (r - 1) - 1)
    c = (big * math.log(3 * 2 ** (r - 1) * K / big) if big > 0 else 0.0) + 2 * math.log(K)
    eta = 0.2 * math.sqrt(c / (2 ** (r - 1) * K))
    gamma = min(0.5, math.sqrt(K * c / 2 ** r))
    beta = 3 * math.sqrt(c / (2 ** (r - 1) * K))
    print(f"rexp3p r={r}: C={big} c={c!r} eta={eta!r} gamma={gamma!r} beta={beta!r}")

# Rexp3P with C identically zero, r = 4
big = min(0 + 1, 7)
print("rexp3p zero budget r=4 c:", repr(big * math.log(3 * 8 * 2 / big) + 2 * math.log(2)))

# Distances on Appendix E segment: min_a sqrt((1-a)^2 + a^2 + 1)
best = min((math.sqrt((1 - a) ** 2 + a ** 2 + 1), a) for a in [i / 100000 for i in range(100001)])
print("appendixE grid min:", best)
