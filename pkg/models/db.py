import datetime as dt
from typing import Type, List, TypeVar, Optional

import psutil
from loguru import logger
from sqlalchemy import create_engine
from sqlmodel import SQLModel, Field, Session, select

from tools import KeyedSingleton

T = TypeVar("T")


class RunRecord(SQLModel, table=True):
    id: Optional[int] = Field(default=None, primary_key=True)
    command: str = Field(index=True)
    config_hash: str = Field(index=True)
    started: dt.datetime
    seconds: float
    # ok | failed | error
    status: str
    output: Optional[str] = None
    peak_rss: Optional[int] = None


def peak_rss() -> Optional[int]:
    """Resident set size of this process in bytes, peak where the platform reports it."""
    try:
        info = psutil.Process().memory_info()
    except psutil.Error as e:
        logger.debug(f"No memory info: {e}")
        return None
    return int(getattr(info, "peak_wset", None) or info.rss)


class DB(metaclass=KeyedSingleton):
    singleton_key = "url"

    def __init__(self, url: str = 'sqlite:///runs.db'):
        if url.startswith('postgres://'):
            url = url.replace('postgres://', 'postgresql://', 1)
        self.url = url
        self.engine = create_engine(url)
        self._ready = False

    def connect(self):
        if not self._ready:
            SQLModel.metadata.create_all(self.engine, checkfirst=True)
            self._ready = True

    def add(self, other: SQLModel):
        self.connect()
        with Session(self.engine) as session:
            session.add(other)
            session.commit()
            session.refresh(other)
        return other

    def get_all(self, table: Type[T]) -> List[T]:
        self.connect()
        with Session(self.engine) as session:
            return list(session.exec(select(table)).all())

    def runs_for(self, config_hash: str, command: Optional[str] = None) -> List[RunRecord]:
        self.connect()
        with Session(self.engine) as session:
            statement = select(RunRecord).where(RunRecord.config_hash == config_hash)
            if command is not None:
                statement = statement.where(RunRecord.command == command)
            return list(session.exec(statement.order_by(RunRecord.id)).all())


def earlier_runs(url: str, command: str, config_hash: str) -> List[RunRecord]:
    """Archived runs of ``command`` with the same config hash; an unreadable archive gives none."""
    try:
        return DB(url=url).runs_for(config_hash, command)
    except Exception as e:
        logger.warning(f"Could not read the run archive at {url}: {e}")
        return []


def archive_run(url: str, command: str, config_hash: str, started: dt.datetime, seconds: float,
                status: str, output: Optional[str] = None) -> Optional[RunRecord]:
    """Append a RunRecord; failures are logged and swallowed."""
    try:
        record = RunRecord(command=command, config_hash=config_hash, started=started, seconds=seconds,
                           status=status, output=output, peak_rss=peak_rss())
        return DB(url=url).add(record)
    except Exception as e:
        logger.warning(f"Could not archive {command} run to {url}: {e}")
        return None
