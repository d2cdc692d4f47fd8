"""Runs vidiag commands and validates every JSON report against the schema."""
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def main():
    exe, schema_path, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    (work / "constant.csv").write_text("log_p,log_q\n" + "-1,-2\n" * 50)
    runs = [
        (["psis", "--input", str(work / "constant.csv")], "psis_constant", {0}),
        (["psis", "--model", "eight-schools-centered", "--s-draws", "2000", "--write-draws"], "psis_model", {0, 2}),
        (["psis", "--input", str(work / "psis_model" / "draws.csv"), "--no-khat-reg"], "psis_file", {0, 2}),
        (["vsbc", "--model", "conjugate-normal", "--oracle", "--m-reps", "30"], "vsbc", {0}),
        (["vsbc", "--model", "eight-schools-centered", "--m-reps", "5", "--eta", "1e12"], "vsbc_aborted", {3}),
        (["fit", "--model", "linear-regression"], "fit", {0}),
        (["fit", "--model", "eight-schools-centered", "--eta", "1e12"], "fit_diverged", {3}),
        (["demo", "schools", "--m-reps", "10", "--s-draws", "1000"], "demo", {0}),
    ]
    failures = 0
    for args, name, codes in runs:
        out = work / name
        proc = subprocess.run([exe, *args, "--seed", "2", "--out", str(out)], capture_output=True, text=True)
        if proc.returncode not in codes:
            print(f"FAIL {name}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        reports = sorted(out.rglob("*.json"))
        if not reports:
            print(f"FAIL {name}: no reports")
            failures += 1
        for path in reports:
            errors = list(validator.iter_errors(json.loads(path.read_text())))
            for e in errors:
                print(f"FAIL {path.relative_to(work)}: {e.json_path}: {e.message}")
            failures += bool(errors)
        print(f"ok {name}: {len(reports)} report(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
