"""Published virtual Euler characteristics of the plane, indexed by (d, m).

Values for m = 0..24 (d = 1, 2) and m = 0..16 (d = 3, 4).
"""

D1 = [3 * (m + 1) for m in range(25)]

D2 = [
    6, 15, 36, 66, -336, -8019, -70098, -399804, -1740870, -6260277,
    -19487496, -54159930, -137321340, -322688919, -711195678, -1483772280,
    -2951904786, -5633344377, -10362608436, -18448659894, -31895447976,
    -53704906971, -88286612970, -142003668276, -223890600030,
]

D3 = [
    10, 27, 72, 154, 306, -19737, -1349404, -32053869, -430135668,
    -3946790877, -27473408784, -154768875579, -736999029842, -3059890203483,
    -1133301372836, -38104196925509, -117902025110844,
]

D4 = [
    15, 42, 117, 264, 561, 1080, 26058, 16548006, 1842925419, 80399046090,
    1942340199207, 30960585072144, 361026356454855, 3293495920441878,
    24626906563808097, 156153491429509728, 861447562288733412,
]

PLANE = {1: D1, 2: D2, 3: D3, 4: D4}

# numerators over (1-q)^(6d); the d=2 one is written in the variable q^n, n = m + 1
NUMERATOR_D2 = {1: 6, 2: -57, 3: 252, 4: -696, 5: 918, 6: -4878, 7: 918, 8: -696,
                9: 252, 10: -57, 11: 6}
NUMERATOR_D3 = [
    10, -153, 1116, -5171, 17118, -63495, -898360, -10996722, -42987618,
    -69231380, -42987618, -10996722, -898360, -63495, 17118, -5171, 1116, -153, 10,
]

HILB_P2 = [1, 3, 9, 22, 51, 108, 221, 429, 810, 1479, 2640, 4599, 7868, 13209]


def reference(d: int, m: int) -> int | None:
    row = PLANE.get(d)
    if row is None or not 0 <= m < len(row):
        return None
    return row[m]
