"""
Reproducible sweeps
===================

Sweeps are described by a small key/value document and emit one self-describing
row per grid point.  The output is the same for any number of worker threads.
"""

# %%
import io

from xyecho.sweeps import run_experiment, validate_config, write_rows

doc = {
    "experiment": "le_time_gammas",
    "chain": {"lambda": [1.0, 1.0, 0.1], "n_sites": [100]},
    "central_spin": {"delta": 0.05},
    "grid": {"time": [0.0, 2.0, 0.5]},
}
cfg = validate_config(doc)
buf = io.StringIO()
write_rows(run_experiment(cfg, threads=4), buf, "csv")
print(buf.getvalue())

# %%
# The same sweep from the shell::
#
#     xyecho le --experiment le_time_gammas --lambda 1 1 0.1 --delta 0.05 \
#         --time 0 2 0.5 --threads 4
