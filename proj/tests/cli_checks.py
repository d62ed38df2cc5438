#!/usr/bin/env python3
"""End-to-end checks of the nonprob command-line tool: exit codes, messages,
output layout and report schema."""

import csv
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

CLI, SCHEMA = sys.argv[1], sys.argv[2]
failures = []


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def run(*args, env=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env)


with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "sim")
    dump = os.path.join(tmp, "dump")
    r = run("simulate", "--scenario", "TT", "--rho", "0.5", "--n-a", "500", "--n-b", "1000",
            "--reps", "2", "--seed", "5", "--out", out, "--dump-samples", dump)
    check("smoke simulate exits 0", r.returncode == 0, r.stderr)
    with open(os.path.join(out, "point_estimators.csv"), newline="") as f:
        rows = list(csv.reader(f))
    check("point table header", rows[0] == ["scenario", "rho", "n_a", "n_b", "estimator", "rb_pct", "mse"])
    check("point table rows", len(rows) == 8 and all(len(x) == 7 for x in rows))
    with open(os.path.join(out, "variance_estimators.csv"), newline="") as f:
        rows = list(csv.reader(f))
    check("variance table header",
          rows[0] == ["scenario", "rho", "n_a", "n_b", "variance_estimator", "rb_pct", "cp_pct"])

    a = os.path.join(dump, "sample_a.csv")
    b = os.path.join(dump, "sample_b.csv")
    report = os.path.join(tmp, "report.json")
    r = run("estimate", "--sample-a", a, "--sample-b", b, "--y", "y", "--prop-x", "x1,x2,x3,x4",
            "--out-x", "x1,x2,x3,x4", "--weight", "weight", "--pop-size", "20000",
            "--estimators", "naive,c1,c2,ipw1,ipw2,reg,sm,dr1,dr2,kh", "--variance", "plugin,kh",
            "--design", "poisson", "--out", report)
    check("estimate exits 0", r.returncode == 0, r.stderr)
    with open(SCHEMA) as f:
        schema = json.load(f)
    with open(report) as f:
        doc = json.load(f)
    try:
        jsonschema.validate(doc, schema)
        ok = True
    except jsonschema.ValidationError as e:
        ok = False
        print(e)
    check("report validates against schema", ok)
    check("report has all estimators", [x["method"] for x in doc["reports"]] ==
          ["naive", "c1", "c2", "ipw1", "ipw2", "reg", "sm", "dr1", "dr2", "kh"])

    # Malformed numeric cell in data row 17.
    bad = os.path.join(tmp, "bad_a.csv")
    with open(a) as f:
        lines = f.read().splitlines()
    cells = lines[17].split(",")
    cells[1] = "oops"
    lines[17] = ",".join(cells)
    with open(bad, "w") as f:
        f.write("\n".join(lines) + "\n")
    r = run("estimate", "--sample-a", bad, "--sample-b", b, "--y", "y", "--prop-x", "x1,x2",
            "--out-x", "x1,x2", "--estimators", "ipw2")
    check("malformed CSV exits 2", r.returncode == 2, str(r.returncode))
    check("malformed CSV message cites row 17", "row 17" in r.stderr, r.stderr)

    r = run("estimate", "--sample-a", a, "--sample-b", b, "--y", "y", "--prop-x", "x1",
            "--out-x", "x1", "--estimators", "ipw1")
    check("missing N exits 2", r.returncode == 2, str(r.returncode))

    r = run("estimate", "--sample-a", a, "--sample-b", b, "--y", "y", "--prop-x", "nope",
            "--out-x", "x1", "--estimators", "ipw2")
    check("unknown column exits 2", r.returncode == 2, str(r.returncode))

    r = run("simulate", "--rho", "0.5")
    check("missing required flags exit 2", r.returncode == 2, str(r.returncode))

    # Sample A entirely above sample B in x1: the pseudo-likelihood has no maximizer.
    sep_a = os.path.join(tmp, "sep_a.csv")
    sep_b = os.path.join(tmp, "sep_b.csv")
    with open(sep_a, "w") as f:
        f.write("x1,y\n" + "".join(f"{1 + 0.1 * i},{i}\n" for i in range(15)))
    with open(sep_b, "w") as f:
        f.write("x1,weight\n" + "".join(f"{-0.05 * i},5\n" for i in range(30)))
    r = run("estimate", "--sample-a", sep_a, "--sample-b", sep_b, "--y", "y", "--prop-x", "x1",
            "--out-x", "x1", "--estimators", "ipw2")
    check("non-convergence exits 3", r.returncode == 3, f"{r.returncode} {r.stderr}")

    # Rank-deficient outcome design: an estimation failure.
    col_a = os.path.join(tmp, "col_a.csv")
    with open(col_a, "w") as f:
        f.write("x1,x2,y\n" + "".join(f"{0.1 * i},{0.2 * i},{i}\n" for i in range(15)))
    col_b = os.path.join(tmp, "col_b.csv")
    with open(col_b, "w") as f:
        f.write("x1,x2,weight\n" + "".join(f"{0.07 * i},{0.3 - 0.01 * i},5\n" for i in range(30)))
    r = run("estimate", "--sample-a", col_a, "--sample-b", col_b, "--y", "y", "--prop-x", "x1",
            "--out-x", "x1,x2", "--estimators", "reg")
    check("estimation failure exits 1", r.returncode == 1, f"{r.returncode} {r.stderr}")

sys.exit(1 if failures else 0)
