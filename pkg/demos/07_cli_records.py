"""The command line writes one JSON record per result, so runs can be diffed.

This demo drives the CLI in-process and shows that the data records from a
small scan come out identical whether one or two worker processes are used.
"""

import io
import json

from sl2lab.cli import parse_args, run


def scan(workers):
    out = io.StringIO()
    run(parse_args(["scan", "--from", "3", "--to", "7", "--seed", "0", "--workers", str(workers)]), out)
    return out.getvalue().splitlines()


one, two = scan(1), scan(2)
for line in one:
    rec = json.loads(line)
    print(rec["type"], json.dumps(rec.get("payload", rec.get("config")))[:100])
print()
print("data records identical across worker counts:", one[1:] == two[1:])
print("headers differ, since they record the worker count:", one[0] != two[0])
