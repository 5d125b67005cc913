# %% [markdown]
# One full run through the command-line entry point. The run writes the
# loop, the certificate, a sampled trajectory, a picture and the descent log
# into one directory. Re-running gives byte-identical output.

# %%
import tempfile
from pathlib import Path

from choreo.cli import main
from choreo.pipeline import read_trajectory_csv

out = Path(tempfile.mkdtemp()) / "run1"
code = main(["solve", "--alpha", "1.0", "--modes", "16", "--rk4-steps", "20000", "--out", str(out)])
print("exit code", code)
for f in sorted(out.iterdir()):
    print(f"{f.name:18s} {f.stat().st_size:8d} bytes")

# %%
traj = read_trajectory_csv(out / "trajectory.csv")
print(traj.shape, "first row:", traj[0])
print((out / "log.txt").read_text().splitlines()[:6])

# %%
# certify the saved loop from scratch
main(["certify", "--loop", str(out / "loop.json"), "--rk4-steps", "20000"])
