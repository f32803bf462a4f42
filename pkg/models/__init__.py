from .db import DB, RunRecord, archive_run, earlier_runs
