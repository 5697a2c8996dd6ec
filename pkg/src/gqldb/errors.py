"""Exception hierarchy shared by all layers of the engine."""


class GqlError(Exception):
    """Base class for every error raised by this package."""


# --- frontend ---

class LexError(GqlError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class ParseError(GqlError):
    def __init__(self, line: int, column: int, expected: str, found: str):
        super().__init__(f"{line}:{column}: expected {expected}, found {found}")
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found


# --- catalog ---

class CatalogError(GqlError):
    pass


class UnknownSchema(CatalogError):
    pass


class DuplicatePath(CatalogError):
    pass


class UnknownGraphType(CatalogError):
    pass


class UnknownGraph(CatalogError):
    pass


class UnknownLabelInConnecting(CatalogError):
    pass


class PropertyTypeMismatch(CatalogError):
    pass


class UnknownLabelInClosedGraph(CatalogError):
    pass


class UnknownProperty(CatalogError):
    pass


class ConnectingViolation(CatalogError):
    pass


class SubPropertyCycle(CatalogError):
    pass


class NotAnEdgeLabel(CatalogError):
    pass


# --- store ---

class StoreError(GqlError):
    pass


class BadMagic(StoreError):
    pass


class IoFailure(StoreError):
    pass


class CrcMismatch(StoreError):
    def __init__(self, position: int):
        super().__init__(f"crc mismatch at position {position}")
        self.position = position


class TruncatedRecord(StoreError):
    def __init__(self, position: int):
        super().__init__(f"truncated record at position {position}")
        self.position = position


class UnknownKind(StoreError):
    def __init__(self, position: int, kind: int):
        super().__init__(f"unknown record kind {kind} at position {position}")
        self.position = position
        self.kind = kind


class PayloadTooLarge(StoreError):
    pass


# --- engine ---

class ExecutionError(GqlError):
    pass


class NoCurrentGraph(ExecutionError):
    pass


class EdgeEndpointMissing(ExecutionError):
    pass


class NodeHasEdges(ExecutionError):
    pass


class ReadOnlyProperty(ExecutionError):
    pass


class UnknownAlias(ExecutionError):
    pass


class ConflictError(ExecutionError):
    """Optimistic commit validation failed; the transaction may be retried."""


# --- remote ---

class RemoteError(GqlError):
    pass


class BindFailure(RemoteError):
    pass


class ConnectFailure(RemoteError):
    pass


class RemoteParseError(RemoteError):
    pass


class RemoteConflict(RemoteError):
    pass


class RemotePreconditionFailed(RemoteError):
    pass


class RemoteServerError(RemoteError):
    pass
