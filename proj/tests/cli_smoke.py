"""Exit codes, manifests and reproducibility of the command-line tool."""
import json
import pathlib
import shutil
import subprocess
import sys

tool, root = sys.argv[1], pathlib.Path(sys.argv[2])
shutil.rmtree(root, ignore_errors=True)
root.mkdir(parents=True)
failures = []


def run(*args):
    return subprocess.run([tool, *args], capture_output=True, text=True)


def expect(name, proc, code):
    if proc.returncode != code:
        failures.append(f"{name}: exit {proc.returncode}, expected {code}\n{proc.stderr}")


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


out = root / "sim_a"
expect("simulate", run("simulate", "--output", str(out), "--trajectories", "40", "--cells", "32"), 0)
m = manifest(out)
if m["exit_code"] != 0 or len(m["config_hash"]) != 40:
    failures.append("simulate manifest incomplete")
csv = (out / "trajectories.csv").read_text().splitlines()
if csv[0] != "n,observable,mean,std_err,count":
    failures.append("unexpected CSV header " + csv[0])

again = root / "sim_b"
expect("simulate again", run("simulate", "--output", str(again), "--trajectories", "40", "--cells", "32"), 0)
for name in ("trajectories.csv", "trajectories.json", "config.json", "position_histogram.csv"):
    if (out / name).read_bytes() != (again / name).read_bytes():
        failures.append(f"{name} not reproducible")

bad = root / "bad.json"
bad.write_text('{"model": {"ssh": {"v": 1}}}')
expect("config error", run("simulate", "--config", str(bad), "--output", str(root / "bad")), 2)
if manifest(root / "bad")["exit_code"] != 2:
    failures.append("manifest missing on config error")

dark = root / "dark.json"
dark.write_text('{"model": {"ssh": {"v": 1, "w": 1}}}')
expect("dark contact", run("topology", "--config", str(dark), "--output", str(root / "dark")), 3)
if "dark contact" not in manifest(root / "dark")["error"]:
    failures.append("dark-contact manifest lacks the contact")

sweep = root / "sweep.json"
sweep.write_text('{"model": {"ssh": {"v": 0.2, "w": 1}}, "sweep": {"parameter": "v", "values": [0.5, 2]}}')
expect("topology sweep", run("topology", "--config", str(sweep), "--output", str(root / "topo")), 0)
if not (root / "topo" / "topology_sweep.csv").exists():
    failures.append("sweep CSV missing")

(root / "locked").mkdir()
(root / "locked" / ".lock").write_text("1\n")
expect("lockfile", run("steady-state", "--output", str(root / "locked")), 2)

expect("unknown flag", run("simulate", "-t", "3"), 2)
expect("jumptime map", run("jumptime-map", "--output", str(root / "map"), "--cells", "8", "--n-max", "2"), 0)
expect("walltime", run("walltime", "--output", str(root / "wall"), "--cells", "16", "--trajectories", "50"), 0)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli smoke checks passed")
