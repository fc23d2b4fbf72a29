"""Exception hierarchy.

Every error raised by the library derives from :class:`KgRecError`.  The
CLI maps :class:`DataError` subclasses to exit status 2 and
:class:`ParameterError` to exit status 1.
"""


class KgRecError(Exception):
    """Base class for all library errors."""


class DataError(KgRecError):
    """Input data violates a schema or invariant."""


class ParameterError(KgRecError, ValueError):
    """A caller-supplied parameter is out of its allowed range."""


class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateIdError(DataError):
    def __init__(self, ident):
        self.ident = ident
        super().__init__(f"duplicate id {ident!r}")


class ReferentialError(DataError):
    """An edge points at a node that does not exist."""


class OntologyError(DataError):
    """A node label or edge endpoint breaks the ontology rules."""


class EmptyDescriptionError(DataError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"node {node_id!r} has an empty description")


class AmbiguityError(DataError):
    """An alias maps to more than one canonical name."""


class EmptyInputError(DataError, ValueError):
    pass


class EmptyVocabError(DataError):
    pass


class DimensionError(KgRecError, ValueError):
    pass


class MissingClassError(DataError):
    pass


class ModelVersionError(DataError):
    pass
