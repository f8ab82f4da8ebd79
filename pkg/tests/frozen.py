"""Reference values produced once by ``oracles`` (exact sympy rank) and frozen.

``test_oracles`` recomputes them so the provenance stays checkable.
"""

# dims: full mask, pair masks (12, 13, 23), single masks; E keyed by 0-based subsets
ZERO = {"full": 6, "pairs": [4, 4, 4], "singles": [2, 2, 2],
        "E": {(0, 1): 0, (0, 2): 0, (1, 2): 0, (0, 1, 2): 0}, "F": 0}
GHZ86 = {"full": 5, "pairs": [3, 3, 3], "singles": [1, 1, 1],
         "E": {(0, 1): 1, (0, 2): 1, (1, 2): 1, (0, 1, 2): 0}, "F": 2}
W = {"full": 4, "pairs": [2, 2, 2], "singles": [1, 1, 1],
     "E": {(0, 1): 0, (0, 2): 0, (1, 2): 0, (0, 1, 2): 1}, "F": 1}
ACE = {"full": 4, "pairs": [2, 3, 2], "singles": [1, 1, 1],
       "E": {(0, 1): 0, (0, 2): 1, (1, 2): 0, (0, 1, 2): 0}, "F": 1}
BELL_ZERO = {"full": 7, "pairs": [5, 3, 3], "singles": [1, 1, 2],
             "E": {(0, 1): 3, (0, 2): 0, (1, 2): 0, (0, 1, 2): 0}, "F": 3}
QQQ_EQUAL = {"full": 9, "E": {(0, 1): 3, (0, 2): 0, (1, 2): 3, (0, 1, 2): 0}}
QQQ_GENERIC = {"full": 7, "E": {(0, 1): 3, (0, 2): 0, (1, 2): 1, (0, 1, 2): 0}}

# parameters used for the frozen states (exact rationals where possible)
W_PARAMS = (2, 3, 6)          # (a, c, d) * 1/7
ACE_PARAMS = (2, 3, 6)        # (a, c, e) * 1/7
QQQ_GENERIC_A = 0.4           # b = sqrt(17/50)

SUPERDENSE_08_06 = 0.98       # SDP optimum of the four encoded states
CHSH_08_06_001 = 2.0190990475713693
