import hashlib
import logging
from datetime import datetime, timezone

from sqlalchemy import BigInteger, Column, DateTime, Integer, String, Text, create_engine, select
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from src.models.program import RunKind, RunOutcome
from src.utils.errors import CacheCorrupt

logger = logging.getLogger(__name__)

Base = declarative_base()


def budget_class(budget):
    """Smallest power of two >= budget (1 for budgets 0 and 1)."""
    return 1 << max(budget - 1, 0).bit_length()


def record_checksum(code, budget, kind, output, steps):
    payload = f"{code}|{budget}|{kind}|{output}|{steps}"
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


class RunRecord(Base):
    __tablename__ = 'run_records'

    record_id = Column(Integer, primary_key=True, autoincrement=True)
    code = Column(Text, nullable=False, index=True)
    budget_class = Column(BigInteger, nullable=False)
    budget = Column(BigInteger, nullable=False)
    kind = Column(String(16), nullable=False)
    output = Column(Text, nullable=False, default='')
    steps = Column(BigInteger, nullable=False)
    checksum = Column(String(64), nullable=False)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))

    def verify(self):
        expected = record_checksum(self.code, self.budget, self.kind, self.output, self.steps)
        if expected != self.checksum:
            raise CacheCorrupt(f"record {self.record_id} for {self.code} failed its checksum")

    def outcome(self):
        return RunOutcome(RunKind(self.kind), self.output, self.steps)

    def to_dict(self):
        return {
            'record_id': self.record_id,
            'code': self.code,
            'budget_class': self.budget_class,
            'budget': self.budget,
            'kind': self.kind,
            'output': self.output,
            'steps': self.steps,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }


class RunCache:
    """Insert-only store of machine runs keyed by code and budget class."""

    def __init__(self, url='sqlite:///:memory:'):
        if url.startswith('sqlite') and ':memory:' in url:
            self.engine = create_engine(url, poolclass=StaticPool,
                                        connect_args={'check_same_thread': False})
        else:
            self.engine = create_engine(url)
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine, expire_on_commit=False)
        self.hits = 0
        self.misses = 0
        self.executions = 0

    def lookup(self, code, budget):
        """A stored outcome valid for `budget`, or None.

        Halted and Invalid outcomes are final once their step count fits the
        budget; Exhausted outcomes only answer the exact budget they ran at.
        """
        with self.Session() as session:
            records = session.scalars(select(RunRecord).where(RunRecord.code == code)).all()
        for record in records:
            record.verify()
            final = record.kind in (RunKind.HALTED.value, RunKind.INVALID.value)
            if (final and record.steps <= budget) or record.budget == budget:
                self.hits += 1
                return record.outcome()
        self.misses += 1
        return None

    def record(self, code, budget, outcome):
        row = RunRecord(
            code=code,
            budget_class=budget_class(budget),
            budget=budget,
            kind=outcome.kind.value,
            output=outcome.output,
            steps=outcome.steps,
            checksum=record_checksum(code, budget, outcome.kind.value, outcome.output, outcome.steps),
        )
        with self.Session() as session:
            session.add(row)
            session.commit()
        return row

    def records(self, code=None):
        with self.Session() as session:
            query = select(RunRecord)
            if code is not None:
                query = query.where(RunRecord.code == code)
            return session.scalars(query.order_by(RunRecord.record_id)).all()

    def stats(self):
        return {'hits': self.hits, 'misses': self.misses, 'executions': self.executions}

    def close(self):
        self.engine.dispose()
