"""Supervisory control with recovery events and synchronizing words."""
from .automaton import (
    Automaton,
    Event,
    EventClass,
    EventTable,
    Verdict,
    accessible,
    coaccessible_states,
    inverse_project,
    language_equal,
    parallel,
    project_word,
    remove_events,
    step,
    step_set,
    trim,
)
from .autfile import dump_aut, parse_aut, read_aut, write_aut
from .closed_loop import ClosedLoopState, Model, enabled_now, exec_event, recover, run_scenario
from .errors import (
    ConfigurationError,
    ControlViolation,
    InputError,
    ParseError,
    PhysicalImpossibility,
    RecosyncError,
    SearchLimitError,
    SimulationError,
)
from .recovery import make_recoverable, make_recoverable_set
from .sync import (
    analyze,
    check_prop1,
    greedy_sync_word,
    is_sync_word,
    recovery_permutations,
    recovery_sync_word,
    shortest_sync_word,
)
from .synthesis import (
    check_nonconflict,
    local_plants,
    merge_specs,
    supc,
    synthesize_modular,
    synthesize_monolithic,
)

__version__ = "0.1.0"
