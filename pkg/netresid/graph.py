"""
Network data model, covariate coding from node descriptors, and file I/O.

Edge covariates ``x_ij`` are stored in an ``n x n x d`` tensor which is
symmetric in its first two indices. Diagonal entries of the adjacency matrix
and of the covariate tensor are never read; they are kept at zero.
"""

import collections
import logging
import os
import warnings

import numpy as np
import pandas as pd

from . import exception

_log = logging.getLogger(__name__)

QUANTITATIVE = 'quantitative'
ORDINAL = 'ordinal'
QUALITATIVE = 'qualitative'

_kinds = (QUANTITATIVE, ORDINAL, QUALITATIVE)


class SelfLoopWarning(UserWarning):
    pass


def _readonly(a):
    a.setflags(write=False)
    return a


class Network():
    """
    An undirected binary network on ``n`` nodes, with optional edge covariates.

    :param adjacency: ``n x n`` array of 0/1 values, symmetric off the diagonal
    :param covariates: ``n x n x d`` real array symmetric in its first two indices, or ``None`` for ``d = 0``
    :param node_ids: original identifiers, indexed by dense node index
    :param covariate_names: one label per covariate column

    Instances are read-only after construction and may be shared by
    concurrent fits.
    """

    def __init__(self, adjacency, covariates=None, node_ids=None, covariate_names=None):
        y = np.array(adjacency, dtype=float)
        if y.ndim != 2 or y.shape[0] != y.shape[1] or y.shape[0] < 1:
            raise exception.BadNetwork('adjacency must be a non-empty square matrix, got shape %s' % (y.shape,))
        n = y.shape[0]
        np.fill_diagonal(y, 0.0)
        if not np.all((y == 0) | (y == 1)):
            raise exception.BadNetwork('adjacency must be binary')
        if not np.array_equal(y, y.T):
            raise exception.BadNetwork('adjacency must be symmetric')

        if covariates is None:
            x = np.zeros((n, n, 0))
        else:
            x = np.array(covariates, dtype=float)
            if x.ndim == 2:
                x = x[:, :, None]
            if x.ndim != 3 or x.shape[:2] != (n, n):
                raise exception.BadNetwork('covariates must have shape (%d, %d, d), got %s' % (n, n, x.shape))
            idx = np.arange(n)
            x[idx, idx, :] = 0.0
            if not np.all(np.isfinite(x)):
                raise exception.BadNetwork('covariates must be finite')
            if not np.allclose(x, x.transpose(1, 0, 2)):
                raise exception.BadNetwork('edge covariates must be symmetric: x_ij = x_ji')

        if node_ids is None:
            node_ids = [str(i + 1) for i in range(n)]
        elif len(node_ids) != n:
            raise exception.BadNetwork('%d node ids given for %d nodes' % (len(node_ids), n))

        if covariate_names is None:
            covariate_names = ['x%d' % (k + 1) for k in range(x.shape[2])]
        elif len(covariate_names) != x.shape[2]:
            raise exception.BadNetwork('%d covariate names given for d=%d' % (len(covariate_names), x.shape[2]))

        self._adjacency = _readonly(y)
        self._covariates = _readonly(x)
        self._node_ids = tuple(str(i) for i in node_ids)
        self._covariate_names = tuple(covariate_names)

    @property
    def n(self):
        return self._adjacency.shape[0]

    @property
    def d(self):
        return self._covariates.shape[2]

    @property
    def adjacency(self):
        return self._adjacency

    @property
    def covariates(self):
        return self._covariates

    @property
    def node_ids(self):
        return self._node_ids

    @property
    def covariate_names(self):
        return self._covariate_names

    @property
    def density(self):
        if self.n < 2:
            return 0.0
        return float(self._adjacency.sum() / (self.n * (self.n - 1)))

    def without_covariates(self):
        return Network(self._adjacency, None, self._node_ids)

    def __repr__(self):
        return 'Network(n=%d, d=%d, edges=%d)' % (self.n, self.d, int(self._adjacency.sum() // 2))


DescriptorColumn = collections.namedtuple('DescriptorColumn', ['name', 'kind', 'levels', 'values'])


class NodeDescriptorTable():
    """
    Per-node descriptor columns, each tagged quantitative, ordinal (``L``
    levels, values in ``{1, ..., L}``) or qualitative (a declared level set).
    """

    def __init__(self, node_ids, columns):
        self._node_ids = tuple(str(i) for i in node_ids)
        n = len(self._node_ids)
        checked = []
        for c in columns:
            values = np.asarray(c.values, dtype=object)
            if values.shape != (n,):
                raise exception.BadDescriptor('expected %d values' % n, c.name, None)
            checked.append(self._check_column(c._replace(values=values)))
        self._columns = tuple(checked)

    def _check_column(self, c):
        if c.kind not in _kinds:
            raise exception.BadDescriptor('unknown descriptor kind %r' % c.kind, c.name, None)

        for i, v in enumerate(c.values):
            if _is_missing(v):
                raise exception.BadDescriptor('missing value (imputation is not performed)', c.name, self._node_ids[i])

        if c.kind == QUANTITATIVE:
            return c._replace(values=c.values.astype(float), levels=None)

        if c.kind == ORDINAL:
            L = int(c.levels)
            if L < 1:
                raise exception.BadDescriptor('ordinal columns need L >= 1', c.name, None)
            values = np.empty(len(c.values), dtype=int)
            for i, v in enumerate(c.values):
                try:
                    f = float(v)
                except (TypeError, ValueError):
                    raise exception.BadDescriptor('ordinal value %r is not an integer' % (v,), c.name, self._node_ids[i])
                if f != int(f) or not 1 <= f <= L:
                    raise exception.BadDescriptor('ordinal value %r outside {1,...,%d}' % (v, L), c.name, self._node_ids[i])
                values[i] = int(f)
            return c._replace(values=values, levels=L)

        values = np.array([str(v) for v in c.values], dtype=object)
        if c.levels is None:
            levels = tuple(dict.fromkeys(values))
        else:
            levels = tuple(str(l) for l in c.levels)
            for i, v in enumerate(values):
                if v not in levels:
                    raise exception.BadDescriptor('undeclared level %r' % v, c.name, self._node_ids[i])
        return c._replace(values=values, levels=levels)

    @property
    def n(self):
        return len(self._node_ids)

    @property
    def node_ids(self):
        return self._node_ids

    @property
    def columns(self):
        return self._columns

    @classmethod
    def from_csv(cls, path, impute_mean=False):
        """
        Read a node table. The first column holds node identifiers; every other
        header cell reads ``name:kind[:levels]`` where ``levels`` is ``L`` for
        ordinal columns and an optional ``|``-separated level list for
        qualitative ones.

        :param impute_mean:
            replace missing quantitative values by the column mean. Missing
            ordinal or qualitative values are always an error.
        """
        if not os.path.exists(path):
            raise exception.BadNetwork('file not found', path)
        try:
            # only empty cells are missing; 'NA' or 'None' can be qualitative levels
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_values=[''], skipinitialspace=True,
                                encoding='utf-8')
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise exception.BadNetwork('cannot parse node table: %s' % e, path)

        if frame.shape[1] < 1:
            raise exception.BadNetwork('node table has no columns', path, 1)

        id_column = frame.columns[0]
        if frame[id_column].isna().any():
            row = int(np.flatnonzero(frame[id_column].isna().to_numpy())[0])
            raise exception.BadNetwork('missing node identifier', path, row + 2)
        node_ids = [s.strip() for s in frame[id_column]]
        if len(set(node_ids)) != len(node_ids):
            raise exception.BadNetwork('duplicated node identifiers', path, 1)

        columns = []
        for header in frame.columns[1:]:
            name, kind, levels = _parse_header(header, path)
            raw = frame[header]
            if kind == QUANTITATIVE:
                values = pd.to_numeric(raw, errors='coerce')
                bad = values.isna() & raw.notna()
                if bad.any():
                    row = int(np.flatnonzero(bad.to_numpy())[0])
                    raise exception.BadNetwork('non-numeric value in column %r' % name, path, row + 2)
                if impute_mean and values.isna().any():
                    _log.info('Imputing %d missing value(s) of column %r by the mean', int(values.isna().sum()), name)
                    values = values.fillna(values.mean())
                values = values.to_numpy(dtype=object)
            else:
                values = np.array([None if pd.isna(v) else v.strip() for v in raw], dtype=object)
            columns.append(DescriptorColumn(name, kind, levels, values))

        return cls(node_ids, columns)


def _is_missing(v):
    if v is None:
        return True
    if isinstance(v, float) and np.isnan(v):
        return True
    return isinstance(v, str) and v.strip() == ''


def _parse_header(header, path):
    parts = [p.strip() for p in str(header).split(':')]
    if len(parts) < 2 or parts[1] not in _kinds:
        raise exception.BadNetwork('header %r must read name:kind[:levels] with kind in %s' % (header, '/'.join(_kinds)), path, 1)
    name, kind = parts[0], parts[1]
    if kind == QUANTITATIVE:
        return name, kind, None
    if kind == ORDINAL:
        if len(parts) < 3 or not parts[2].isdigit():
            raise exception.BadNetwork('ordinal column %r must declare its number of levels' % name, path, 1)
        return name, kind, int(parts[2])
    if len(parts) >= 3 and parts[2]:
        return name, kind, tuple(l.strip() for l in parts[2].split('|'))
    return name, kind, None


def coded_width(nodes, d_edges=0):
    """
    Number of covariates produced by :func:`code_covariates`.
    """
    width = d_edges
    for c in nodes.columns:
        if c.kind == QUANTITATIVE:
            width += 1
        elif c.kind == ORDINAL:
            width += c.levels - 1
        else:
            width += 2 * len(c.levels)
    return width


def coded_names(nodes, edge_names=()):
    names = list(edge_names)
    for c in nodes.columns:
        if c.kind == QUANTITATIVE:
            names.append('|%s|' % c.name)
        elif c.kind == ORDINAL:
            names.extend('%s:diff=%d' % (c.name, m) for m in range(1, c.levels))
        else:
            for level in c.levels:
                names.extend(['%s:both=%s' % (c.name, level), '%s:one=%s' % (c.name, level)])
    return names


def code_covariates(nodes, edges=None):
    """
    Build edge covariates from node descriptors.

    The output concatenates, in order:

    - raw quantitative edge descriptors (``edges``), if any
    - ``|x_i - x_j|`` for each quantitative node column
    - for each ordinal column with ``L`` levels, the factor ``|x_i - x_j|``
      coded as ``L - 1`` indicator columns (difference 0 is the baseline)
    - for each qualitative column with ``L`` levels, ``2L`` indicator columns:
      per level, "both ``i`` and ``j`` have it" then "exactly one has it"

    :type nodes: :class:`NodeDescriptorTable`
    :param edges: optional ``n x n x d'`` symmetric tensor
    :return: ``n x n x d`` array, symmetric in ``(i, j)``, zero diagonal
    """
    n = nodes.n
    blocks = []

    if edges is not None:
        e = np.asarray(edges, dtype=float)
        if e.ndim == 2:
            e = e[:, :, None]
        if e.shape[:2] != (n, n):
            raise exception.BadNetwork('edge descriptors must have shape (%d, %d, d), got %s' % (n, n, e.shape))
        if not np.allclose(e, e.transpose(1, 0, 2)):
            raise exception.BadNetwork('edge descriptors must be symmetric: x_ij = x_ji')
        blocks.append(e)

    for c in nodes.columns:
        if c.kind == QUANTITATIVE:
            x = c.values.astype(float)
            blocks.append(np.abs(x[:, None] - x[None, :])[:, :, None])
        elif c.kind == ORDINAL:
            x = c.values.astype(int)
            diff = np.abs(x[:, None] - x[None, :])
            levels = np.arange(1, c.levels)
            blocks.append((diff[:, :, None] == levels[None, None, :]).astype(float))
        else:
            cols = []
            for level in c.levels:
                a = c.values == level
                cols.append(a[:, None] & a[None, :])
                cols.append(a[:, None] ^ a[None, :])
            blocks.append(np.stack(cols, axis=2).astype(float) if cols else np.zeros((n, n, 0)))

    if not blocks:
        return np.zeros((n, n, 0))

    x = np.concatenate(blocks, axis=2)
    idx = np.arange(n)
    x[idx, idx, :] = 0.0
    return x


def standardize(network):
    """
    Center and scale every covariate over the unordered pairs ``i < j``.
    Constant columns are only centered.
    """
    if network.d == 0:
        return network
    iu = np.triu_indices(network.n, k=1)
    x = np.array(network.covariates)
    values = x[iu]
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std[std == 0] = 1.0
    x = (x - mean) / std
    return Network(network.adjacency, x, network.node_ids, network.covariate_names)


def _open_text(path):
    if not os.path.exists(path):
        raise exception.BadNetwork('file not found', path)
    return open(path, encoding='utf-8')


def _read_edge_list(path):
    edges = []
    with _open_text(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise exception.BadNetwork('expected "i j", got %r' % line, path, lineno)
            i, j = tokens
            if i == j:
                msg = '%s:%d: self-loop on node %s dropped' % (path, lineno, i)
                _log.warning(msg)
                warnings.warn(msg, SelfLoopWarning)
                continue
            edges.append((i, j, lineno))
    return edges


def _read_edge_covariates(path, index, fixed):
    if not os.path.exists(path):
        raise exception.BadNetwork('file not found', path)
    try:
        frame = pd.read_csv(path, dtype={0: str, 1: str}, skipinitialspace=True, encoding='utf-8')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise exception.BadNetwork('cannot parse edge covariates: %s' % e, path)
    if frame.shape[1] < 3:
        raise exception.BadNetwork('edge covariates need columns i, j, v1, ...', path, 1)

    names = [str(c) for c in frame.columns[2:]]
    ids_i = frame.iloc[:, 0].astype(str).str.strip().tolist()
    ids_j = frame.iloc[:, 1].astype(str).str.strip().tolist()
    try:
        values = frame.iloc[:, 2:].to_numpy(dtype=float)
    except ValueError as e:
        raise exception.BadNetwork('non-numeric edge covariate: %s' % e, path)

    for a, b in zip(ids_i, ids_j):
        for node in (a, b):
            if node not in index:
                if fixed:
                    raise exception.BadNetwork('unknown node %r' % node, path)
                index[node] = len(index)

    n = len(index)
    x = np.zeros((n, n, len(names)))
    seen = np.zeros((n, n), dtype=bool)
    for row, (a, b) in enumerate(zip(ids_i, ids_j)):
        lineno = row + 2
        i, j = index[a], index[b]
        if i == j:
            continue
        v = values[row]
        if not np.all(np.isfinite(v)):
            raise exception.BadNetwork('missing edge covariate value', path, lineno)
        if seen[i, j] and not np.allclose(x[i, j], v):
            raise exception.BadNetwork('asymmetric edge covariates for pair (%s, %s)' % (a, b), path, lineno)
        x[i, j] = x[j, i] = v
        seen[i, j] = seen[j, i] = True

    np.fill_diagonal(seen, True)
    if not seen.all():
        i, j = np.argwhere(~seen)[0]
        inverse = list(index)
        raise exception.BadNetwork('no covariates for pair (%s, %s)' % (inverse[i], inverse[j]), path)
    return x, names


def read_network(edge_list_path, covariate_path=None, node_table_path=None, nodes=None,
                 impute_mean=False, standardize_covariates=False):
    """
    Read a network from files.

    :param edge_list_path:
        whitespace-separated ``i j`` per undirected edge; ``#`` starts a comment.
        Self-loops are dropped with a :class:`SelfLoopWarning`.

    :param covariate_path:
        CSV of ``i, j, v1, ..., vd'`` rows, one per unordered pair.

    :param node_table_path:
        node descriptor CSV (see :meth:`NodeDescriptorTable.from_csv`); when
        given, :func:`code_covariates` is applied and the table fixes the node set.

    :param nodes:
        declared node identifiers, or an integer ``n`` declaring ``1..n``.
        Lets isolated nodes exist without appearing in the edge list.

    Node identifiers are mapped to dense indices ``0..n-1`` in first-appearance
    order (declared nodes, node table, edge list, covariate file).
    """
    index = collections.OrderedDict()
    if isinstance(nodes, int):
        nodes = [str(i + 1) for i in range(nodes)]
    for node in nodes or ():
        index.setdefault(str(node), len(index))

    table = None
    if node_table_path is not None:
        table = NodeDescriptorTable.from_csv(node_table_path, impute_mean=impute_mean)
        for node in table.node_ids:
            index.setdefault(node, len(index))
        if len(index) != table.n:
            raise exception.BadNetwork('declared nodes missing from the node table', node_table_path)

    fixed = table is not None
    edges = _read_edge_list(edge_list_path)
    for a, b, lineno in edges:
        for node in (a, b):
            if node not in index:
                if fixed:
                    raise exception.BadNetwork('node %r has no descriptors' % node, edge_list_path, lineno)
                index[node] = len(index)

    x_edges, edge_names = None, []
    if covariate_path is not None:
        x_edges, edge_names = _read_edge_covariates(covariate_path, index, fixed)

    n = len(index)
    if n == 0:
        raise exception.BadNetwork('network has no nodes', edge_list_path)
    y = np.zeros((n, n))
    for a, b, _ in edges:
        i, j = index[a], index[b]
        y[i, j] = y[j, i] = 1.0

    if table is not None:
        order = [table.node_ids.index(node) for node in index]
        table = NodeDescriptorTable([table.node_ids[k] for k in order],
                                    [c._replace(values=c.values[order]) for c in table.columns])
        x = code_covariates(table, x_edges)
        names = coded_names(table, edge_names)
    else:
        x, names = x_edges, edge_names if x_edges is not None else None

    network = Network(y, x, list(index), names)
    _log.info('Read %r from %s', network, edge_list_path)
    if standardize_covariates:
        network = standardize(network)
    return network


def write_edge_list(path, network):
    iu, ju = np.nonzero(np.triu(network.adjacency, k=1))
    ids = network.node_ids
    with open(path, 'w', encoding='utf-8') as f:
        for i, j in zip(iu, ju):
            f.write('%s %s\n' % (ids[i], ids[j]))


def write_edge_covariates(path, network):
    iu = np.triu_indices(network.n, k=1)
    ids = np.asarray(network.node_ids, dtype=object)
    frame = pd.DataFrame(network.covariates[iu], columns=list(network.covariate_names))
    frame.insert(0, 'j', ids[iu[1]])
    frame.insert(0, 'i', ids[iu[0]])
    frame.to_csv(path, index=False, encoding='utf-8')
