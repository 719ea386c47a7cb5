import datetime
import logging
from typing import Optional

from sqlalchemy import (JSON, Column, DateTime, ForeignKey, Integer, String, create_engine,
                        select)
from sqlalchemy.orm import Session, declarative_base, relationship, sessionmaker
from sqlalchemy.pool import StaticPool

from dynamics.records import CensusReport, CensusFinding, CensusFailure, PeriodicPointRecord
from utils.config import settings
from utils.rational import height, parse_rational

logger = logging.getLogger(__name__)

Base = declarative_base()


class Database:
    def __init__(self, url: Optional[str] = None):
        self.url = url
        self._engine = None
        self._sessionmaker = None

    @property
    def engine(self):
        """Engine for the configured URL, created on first use"""
        if self._engine is None:
            url = self.url or settings.database_url
            options = {}
            if url in ("sqlite://", "sqlite:///:memory:"):
                # One shared connection, otherwise every session sees an empty database
                options = {"poolclass": StaticPool, "connect_args": {"check_same_thread": False}}
            self._engine = create_engine(url, echo=False, future=True, **options)
        return self._engine

    def init_models(self):
        """Create the census tables"""
        Base.metadata.create_all(self.engine)
        logger.info("Census tables are ready")

    def get_session(self) -> Session:
        """Create and return a session for working with the database"""
        if self._sessionmaker is None:
            self._sessionmaker = sessionmaker(self.engine, expire_on_commit=False)
        return self._sessionmaker()


# Database models
class CensusRun(Base):
    __tablename__ = "census_runs"

    id = Column(Integer, primary_key=True)
    d = Column(Integer, nullable=False)
    N = Column(Integer, nullable=False)
    n_max = Column(Integer, nullable=False)
    # Counts, ratios and failures; findings live in census_entries
    summary = Column(JSON, nullable=False)
    created_at = Column(DateTime, default=datetime.datetime.now)

    entries = relationship(
        "CensusEntry", back_populates="run", cascade="all, delete-orphan",
        order_by="CensusEntry.position",
    )

    @classmethod
    def create_from_report(cls, session: Session, report: CensusReport) -> "CensusRun":
        """Store a census report with one entry per cycle"""
        summary = report.to_dict()
        summary.pop("findings")
        run = cls(d=report.d, N=report.N, n_max=report.n_max, summary=summary)
        for position, finding in enumerate(report.findings):
            run.entries.append(CensusEntry.from_finding(finding, position))
        session.add(run)
        session.commit()
        session.refresh(run)
        logger.info(f"Stored census run {run.id} with {len(report.findings)} cycles")
        return run

    @classmethod
    def get_matching(cls, session: Session, d: int, N: int, n_max: int) -> Optional["CensusRun"]:
        """Get the most recent run with the same parameters"""
        result = session.execute(
            select(cls)
            .where(cls.d == d, cls.N == N, cls.n_max == n_max)
            .order_by(cls.id.desc())
        )
        return result.scalars().first()

    def to_report(self) -> CensusReport:
        """Rebuild the stored report"""
        data = dict(self.summary)
        data["findings"] = []
        report = CensusReport.from_dict(data)
        findings = tuple(entry.to_finding() for entry in self.entries)
        failures = tuple(CensusFailure.from_dict(f) for f in self.summary.get("failures", []))
        return CensusReport(
            d=report.d,
            N=report.N,
            n_max=report.n_max,
            s_count=report.s_count,
            sd_reduced=report.sd_reduced,
            sd_pairs=report.sd_pairs,
            p_count=report.p_count,
            pd_count=report.pd_count,
            predicted=report.predicted,
            findings=findings,
            failures=failures,
        )


class CensusEntry(Base):
    __tablename__ = "census_entries"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("census_runs.id"), nullable=False, index=True)
    position = Column(Integer, nullable=False)
    c = Column(String, nullable=False, index=True)
    height = Column(Integer, nullable=False)
    n = Column(Integer, nullable=False)
    # The cycle record as serialized by PeriodicPointRecord.to_dict
    record = Column(JSON, nullable=False)

    run = relationship("CensusRun", back_populates="entries")

    @classmethod
    def from_finding(cls, finding: CensusFinding, position: int) -> "CensusEntry":
        return cls(
            position=position,
            c=str(finding.c),
            height=height(finding.c),
            n=finding.record.n,
            record=finding.record.to_dict(),
        )

    def to_finding(self) -> CensusFinding:
        return CensusFinding(c=parse_rational(self.c), record=PeriodicPointRecord.from_dict(self.record))


# Create a global database object
db = Database()
