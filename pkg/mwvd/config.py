"""Runtime configuration read from the environment"""
import os

#Numeric tolerances (relative to the instance scale)
REL_TOL = float(os.getenv("MWVD_REL_TOL", "1e-9"))
DEDUP_TOL = float(os.getenv("MWVD_DEDUP_TOL", "1e-7"))
#Overlay noding snaps to a power-of-two grid about this fraction of the box diameter
SNAP_TOL = float(os.getenv("MWVD_SNAP_TOL", "1e-11"))

#World box: inflation around the instance features, and the first-pass horizon
BOX_FACTOR = float(os.getenv("MWVD_BOX_FACTOR", "2.0"))
HORIZON = float(os.getenv("MWVD_HORIZON", "1e6"))

#Experiment defaults
MASTER_SEED = int(os.getenv("MWVD_SEED", "20240601"))
WORKERS = int(os.getenv("MWVD_WORKERS", "1"))
JITTER_RETRIES = int(os.getenv("MWVD_JITTER_RETRIES", "3"))

LOG_LEVEL = os.getenv("MWVD_LOG_LEVEL", "INFO")
