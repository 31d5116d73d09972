class NetresidException(Exception):
    """ Base class of following exceptions. """
    pass


class BadNetwork(NetresidException):
    """
    A network input could not be turned into a :class:`.Network`. The file
    and line are kept when the problem comes from a file, so that command-line
    diagnostics can point at it.
    """

    @property
    def message(self):
        return self.args[0]

    @property
    def path(self):
        return self.args[1] if len(self.args) > 1 else None

    @property
    def line(self):
        return self.args[2] if len(self.args) > 2 else None

    def __str__(self):
        where = ''
        if self.path is not None:
            where = str(self.path)
            if self.line is not None:
                where += ':%d' % self.line
            where += ': '
        return where + self.message


class BadDescriptor(NetresidException):
    """
    A node descriptor could not be coded into edge covariates: missing value,
    ordinal value outside ``{1, ..., L}`` or an undeclared qualitative level.
    """

    @property
    def message(self):
        return self.args[0]

    @property
    def column(self):
        return self.args[1]

    @property
    def node(self):
        return self.args[2]

    def __str__(self):
        return '%s (column %r, node %r)' % (self.message, self.column, self.node)


class BadConfig(NetresidException):

    @property
    def message(self):
        return self.args[0]

    @property
    def field(self):
        return self.args[1]

    def __str__(self):
        return '%s: %s' % (self.field, self.message)


class ContractViolation(NetresidException):
    pass


class FitFailed(NetresidException):
    """
    Raised when a variational fit cannot produce a finite bound. ``restart`` is
    ``None`` when every restart for ``K`` failed.
    """

    @property
    def K(self):
        return self.args[0]

    @property
    def restart(self):
        return self.args[1]

    @property
    def reason(self):
        return self.args[2]

    def __str__(self):
        if self.restart is None:
            return 'all restarts failed for K=%d: %s' % (self.K, self.reason)
        return 'fit failed for K=%d, restart %d: %s' % (self.K, self.restart, self.reason)


class CorruptResult(NetresidException):

    @property
    def path(self):
        return self.args[0]

    @property
    def reason(self):
        return self.args[1]

    def __str__(self):
        return '%s: %s' % (self.path, self.reason)
