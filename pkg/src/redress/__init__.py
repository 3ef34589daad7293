"""redress: a victim-centred abuse response toolkit.

Reports are documented with content-addressed evidence that survives erasure,
validated by crowds of qualified verifiers, funded by escrowed fees settled
against verified abusers or bad-faith reporters, and certified with signed
attestations. Includes a deterministic agent simulator and the nonparametric
statistics used for platform abuse analytics.
"""

from . import attest, stats
from .attest import AbuseCertificate, SignedAcknowledgement, SigningKey, canonicalize, verify
from .cases import (
    AbuseCategory,
    CaseEngine,
    CaseState,
    ProgressView,
    ReportCase,
    allowed_transitions,
)
from .crowd import (
    AggregateOutcome,
    AggregationMode,
    AggregationPolicy,
    Ballot,
    Decision,
    RedactedView,
    VerifierProfile,
    aggregate_impact,
    aggregate_majority,
    aggregate_weighted,
    anonymize_texts,
    select_verifiers,
    update_reliability,
)
from .eventlog import EventLog, EventRecord, read_records
from .guard import Guard, RateLimitPolicy, ReporterStanding
from .ledger import EscrowLedger, LedgerEntry, PenaltySchedule, penalty_amount
from .linkage import AlertEvent, AttributeKind, IdentityAttribute, LinkageGraph
from .platform import Account, Platform, PlatformConfig, replay, replay_file
from .simulator import (
    AgentGroup,
    MetricsReport,
    ScenarioSpec,
    Simulation,
    run_scenario,
    scenario_from_dict,
)
from .vault import EvidenceSnapshot, EvidenceVault, PostContent, RetentionPolicy

__version__ = "0.1.0"
