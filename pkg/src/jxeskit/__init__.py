"""JXES, the JSON encoding of XES event logs: model, I/O, validation, benchmarks."""

from .errors import (
    IntOutOfRange,
    JxesError,
    MalformedJson,
    MalformedXml,
    ReservedKeyMisuse,
    SchemaViolation,
    UnsupportedConstruct,
)
from .formats import Format, load_log, save_log
from .loggen import GenProfile, generate
from .model import (
    Attribute,
    AttrList,
    Container,
    Event,
    EventLog,
    Extension,
    GlobalAttributes,
    Stats,
    Trace,
    log_statistics,
    logs_equivalent,
)
from .reader import BackendKind, ParseOptions, parse_jxes, read_jxes
from .validator import Diagnostic, validate_document
from .writer import canonicalize, save_jxes, write_jxes
from .xes import XesDocumentMeta, parse_xes, read_xes, write_xes

__version__ = "0.1.0"
