import os

import psutil

env_vars = {
  # Log level for the stdout sink
  "LOG_LEVEL": "INFO",
  # Run archive database, sqlite by default
  "RUN_ARCHIVE": "sqlite:///runs.db",
  # FFT worker threads, empty means one per logical cpu
  "KG_THREADS": os.environ.get("KG_THREADS", ""),
}

workers = int(env_vars.get('KG_THREADS') or psutil.cpu_count(logical=True) or 1)

dbname = env_vars.get('RUN_ARCHIVE') or 'sqlite:///runs.db'

if dbname.startswith('postgres://'):
    dbname = dbname.replace('postgres://', 'postgresql://', 1)

# Numerical defaults, echoed into every report that uses them
defaults = {
    # (assm1)/(assm2) comparisons
    "condition_tol": 1e-12,
    # K_0 threshold of the Z diagnostic and frequency regimes
    "K0": 10,
    # D_0 separation used by the regime lower-bound scan
    "D0": 2,
    # decay constant of the integration by parts bound
    "ibp_gamma": 0.1,
    # sign-change scan density, samples per unit length
    "scan_density": 4096,
    "newton_tol": 1e-12,
    "dedup_radius": 1e-6,
    # highest spherical-harmonic degree the sphere quadrature will build
    "max_degree": 24,
    # conjugation drift above this is logged as a warning
    "conjugation_tol": 1e-10,
    # fraction of L2 mass allowed in the outer box layer of a decay run
    "wrap_threshold": 1e-3,
    # zero padding factor for sup norms
    "sup_padding": 4,
    # quadrature cell budget of the oscillatory oracle
    "max_cells": 2_000_000,
}
