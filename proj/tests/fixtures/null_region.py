# Undefined output for x_1 > 0.5, a quadratic elsewhere.
import json
import sys

for line in sys.stdin:
    x = json.loads(line)["x"]
    if x[0] > 0.5:
        print(json.dumps({"y": None, "feasible": False}), flush=True)
    else:
        print(json.dumps({"y": (x[0] - 0.2) ** 2 + x[1] ** 2, "feasible": True}), flush=True)
