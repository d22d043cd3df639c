"""embot: a hardware-optional embodied voice-assistant runtime.

Push-to-talk dialog sessions turn spoken input into an LLM reply plus one of
five sentiment labels, which drive a 7-joint gesture engine over a byte-exact
device link (virtual simulator or real microcontroller). Includes the console
service, transcript persistence, and the pilot-study analytics tooling.
"""

from .dialog import (
    BrevityReport,
    ConversationHistory,
    DEFAULT_PREPROMPT,
    Role,
    SentimentLabel,
    SessionEvent,
    SessionState,
    Turn,
    enforce_brevity,
    new_session,
    transition,
)
from .pipeline import AgentReply, TurnOutcome, build_messages, parse_agent_reply, run_turn
from .gestures import (
    GesturePlan,
    GestureTable,
    JitterConfig,
    JointId,
    Keyframe,
    default_table,
    interpolate,
    plan,
)
from .device import (
    TelemetryFrame,
    VirtualDevice,
    decode_command,
    encode_command,
)
from .session import SessionRunner, SystemClock, VirtualClock

__version__ = "0.1.0"

__all__ = [
    "AgentReply",
    "BrevityReport",
    "ConversationHistory",
    "DEFAULT_PREPROMPT",
    "GesturePlan",
    "GestureTable",
    "JitterConfig",
    "JointId",
    "Keyframe",
    "Role",
    "SentimentLabel",
    "SessionEvent",
    "SessionRunner",
    "SessionState",
    "SystemClock",
    "TelemetryFrame",
    "Turn",
    "TurnOutcome",
    "VirtualClock",
    "VirtualDevice",
    "build_messages",
    "decode_command",
    "default_table",
    "encode_command",
    "enforce_brevity",
    "interpolate",
    "new_session",
    "parse_agent_reply",
    "plan",
    "run_turn",
    "transition",
    "__version__",
]
