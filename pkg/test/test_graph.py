import numpy as np
import numpy.testing as npt
import pytest

from netresid import exception
from netresid.graph import (Network, NodeDescriptorTable, DescriptorColumn, code_covariates, coded_width,
                            coded_names, read_network, standardize, write_edge_list, write_edge_covariates,
                            SelfLoopWarning, QUANTITATIVE, ORDINAL, QUALITATIVE)


def write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


# Network

def test_network_ignores_diagonal():
    net = Network([[1, 1], [1, 1]])
    npt.assert_array_equal(net.adjacency, [[0, 1], [1, 0]])
    assert net.n == 2
    assert net.d == 0
    assert net.density == 1.0


def test_network_rejects_asymmetric():
    with pytest.raises(exception.BadNetwork):
        Network([[0, 1], [0, 0]])


def test_network_rejects_non_binary():
    with pytest.raises(exception.BadNetwork):
        Network([[0, 2], [2, 0]])


def test_network_rejects_asymmetric_covariates():
    x = np.zeros((3, 3, 1))
    x[0, 1, 0] = 1.0
    with pytest.raises(exception.BadNetwork):
        Network(np.zeros((3, 3)), x)


def test_network_read_only():
    net = Network(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        net.adjacency[0, 1] = 1


# covariate coding

def table(*columns, n=3):
    return NodeDescriptorTable([str(i + 1) for i in range(n)], list(columns))


def test_qualitative_coding():
    nodes = table(DescriptorColumn('group', QUALITATIVE, ('A', 'B'), ['A', 'A', 'B']))
    x = code_covariates(nodes)
    assert x.shape == (3, 3, 4)
    # both-A, one-A, both-B, one-B
    npt.assert_array_equal(x[0, 1], [1, 0, 0, 0])
    npt.assert_array_equal(x[0, 2], [0, 1, 0, 1])
    assert coded_names(nodes) == ['group:both=A', 'group:one=A', 'group:both=B', 'group:one=B']


def test_quantitative_coding():
    nodes = table(DescriptorColumn('age', QUANTITATIVE, None, [3.0, 3.0, 5.5]))
    x = code_covariates(nodes)
    assert x[0, 1, 0] == 0.0
    assert x[0, 2, 0] == 2.5
    assert x[2, 0, 0] == 2.5


def test_ordinal_coding():
    nodes = table(DescriptorColumn('rank', ORDINAL, 3, [1, 3, 2]))
    x = code_covariates(nodes)
    assert x.shape == (3, 3, 2)
    npt.assert_array_equal(x[0, 1], [0, 1])
    npt.assert_array_equal(x[0, 2], [1, 0])
    npt.assert_array_equal(x[1, 2], [1, 0])


def test_coded_width_and_symmetry():
    edges = np.random.default_rng(0).normal(size=(4, 4, 2))
    edges = edges + edges.transpose(1, 0, 2)
    nodes = table(DescriptorColumn('a', QUANTITATIVE, None, [1.0, 2.0, 0.5, 4.0]),
                  DescriptorColumn('b', ORDINAL, 4, [1, 2, 4, 4]),
                  DescriptorColumn('c', QUALITATIVE, ('x', 'y', 'z'), ['x', 'z', 'z', 'y']),
                  n=4)
    x = code_covariates(nodes, edges)
    assert x.shape[2] == coded_width(nodes, 2) == 2 + 1 + 3 + 6
    npt.assert_array_equal(x, x.transpose(1, 0, 2))
    npt.assert_array_equal(x[np.arange(4), np.arange(4)], 0)


def test_coding_rejects_asymmetric_edges():
    nodes = table(DescriptorColumn('a', QUANTITATIVE, None, [1.0, 2.0, 3.0]))
    edges = np.zeros((3, 3, 1))
    edges[0, 1, 0] = 1.0
    with pytest.raises(exception.BadNetwork):
        code_covariates(nodes, edges)


def test_ordinal_out_of_range():
    with pytest.raises(exception.BadDescriptor) as info:
        table(DescriptorColumn('rank', ORDINAL, 3, [1, 4, 2]))
    assert info.value.node == '2'


def test_missing_descriptor():
    with pytest.raises(exception.BadDescriptor):
        table(DescriptorColumn('age', QUANTITATIVE, None, [1.0, None, 2.0]))


def test_undeclared_level():
    with pytest.raises(exception.BadDescriptor):
        table(DescriptorColumn('group', QUALITATIVE, ('A', 'B'), ['A', 'C', 'B']))


# files

def test_read_single_edge(tmp_path):
    net = read_network(write(tmp_path / 'e.txt', '1 2\n'))
    assert net.n == 2
    assert net.d == 0
    npt.assert_array_equal(net.adjacency, [[0, 1], [1, 0]])


def test_read_declared_nodes(tmp_path):
    net = read_network(write(tmp_path / 'e.txt', '# no edges\n'), nodes=3)
    assert net.n == 3
    npt.assert_array_equal(net.adjacency, np.zeros((3, 3)))


def test_read_drops_self_loops(tmp_path):
    path = write(tmp_path / 'e.txt', '1 2\n1 1\n2 3\n')
    with pytest.warns(SelfLoopWarning):
        net = read_network(path)
    assert net.n == 3
    assert net.adjacency.sum() == 4


def test_read_first_appearance_order(tmp_path):
    net = read_network(write(tmp_path / 'e.txt', 'b c\na b\n'))
    assert net.node_ids == ('b', 'c', 'a')
    assert net.adjacency[0, 1] == 1
    assert net.adjacency[2, 0] == 1


def test_read_malformed_line(tmp_path):
    path = write(tmp_path / 'e.txt', '1 2\n1 2 3\n')
    with pytest.raises(exception.BadNetwork) as info:
        read_network(path)
    assert info.value.line == 2
    assert str(info.value).startswith(path + ':2:')


def test_read_missing_covariate_file(tmp_path):
    edges = write(tmp_path / 'e.txt', '1 2\n')
    missing = str(tmp_path / 'nope.csv')
    with pytest.raises(exception.BadNetwork) as info:
        read_network(edges, missing)
    assert missing in str(info.value)


def test_read_edge_covariates(tmp_path):
    edges = write(tmp_path / 'e.txt', '1 2\n2 3\n')
    cov = write(tmp_path / 'x.csv', 'i,j,dist\n1,2,0.5\n1,3,2.0\n2,3,1.5\n')
    net = read_network(edges, cov)
    assert net.d == 1
    assert net.covariate_names == ('dist',)
    assert net.covariates[2, 0, 0] == 2.0
    assert net.covariates[0, 2, 0] == 2.0


def test_read_asymmetric_covariates(tmp_path):
    edges = write(tmp_path / 'e.txt', '1 2\n')
    cov = write(tmp_path / 'x.csv', 'i,j,dist\n1,2,0.5\n2,1,0.7\n')
    with pytest.raises(exception.BadNetwork, match='asymmetric'):
        read_network(edges, cov)


def test_read_incomplete_covariates(tmp_path):
    edges = write(tmp_path / 'e.txt', '1 2\n2 3\n')
    cov = write(tmp_path / 'x.csv', 'i,j,dist\n1,2,0.5\n2,3,1.0\n')
    with pytest.raises(exception.BadNetwork, match='no covariates'):
        read_network(edges, cov)


def test_read_node_table(tmp_path):
    edges = write(tmp_path / 'e.txt', 'c a\n')
    nodes = write(tmp_path / 'n.csv', 'id,age:quantitative,rank:ordinal:3,group:qualitative:A|B\n'
                                      'a,30,1,A\nb,35,3,A\nc,30,2,B\n')
    net = read_network(edges, node_table_path=nodes)
    assert net.node_ids == ('a', 'b', 'c')
    assert net.d == 1 + 2 + 4
    # a-c: |30 - 30| = 0, rank diff 1, one-A and one-B
    npt.assert_array_equal(net.covariates[0, 2], [0, 1, 0, 0, 1, 0, 1])
    assert net.covariate_names[0] == '|age|'


def test_read_node_table_missing_value(tmp_path):
    edges = write(tmp_path / 'e.txt', 'a b\n')
    nodes = write(tmp_path / 'n.csv', 'id,age:quantitative\na,30\nb,\nc,40\n')
    with pytest.raises(exception.BadDescriptor):
        read_network(edges, node_table_path=nodes)
    net = read_network(edges, node_table_path=nodes, impute_mean=True)
    assert net.covariates[0, 1, 0] == 5.0


def test_read_node_table_na_level(tmp_path):
    edges = write(tmp_path / 'e.txt', 'a b\nb c\n')
    nodes = write(tmp_path / 'n.csv', 'id,group:qualitative:NA|None\na,NA\nb,None\nc,NA\n')
    net = read_network(edges, node_table_path=nodes)
    assert net.d == 4
    npt.assert_array_equal(net.covariates[0, 2], net.covariates[2, 0])
    assert not np.array_equal(net.covariates[0, 1], net.covariates[0, 2])


def test_read_unknown_node_with_table(tmp_path):
    edges = write(tmp_path / 'e.txt', 'a z\n')
    nodes = write(tmp_path / 'n.csv', 'id,age:quantitative\na,30\nb,35\n')
    with pytest.raises(exception.BadNetwork) as info:
        read_network(edges, node_table_path=nodes)
    assert info.value.line == 1


def test_standardize():
    rng = np.random.default_rng(1)
    x = rng.normal(3.0, 2.0, size=(6, 6, 2))
    x = x + x.transpose(1, 0, 2)
    x[:, :, 1] = 4.0
    net = standardize(Network(np.zeros((6, 6)), x))
    iu = np.triu_indices(6, k=1)
    values = net.covariates[iu]
    npt.assert_allclose(values.mean(axis=0), 0.0, atol=1e-12)
    npt.assert_allclose(values[:, 0].std(), 1.0)
    npt.assert_allclose(values[:, 1], 0.0, atol=1e-12)


def test_write_and_read_back(tmp_path):
    rng = np.random.default_rng(2)
    y = np.triu(rng.random((5, 5)) < 0.5, k=1).astype(float)
    y[0, 1] = 1.0
    x = rng.normal(size=(5, 5, 1))
    x = x + x.transpose(1, 0, 2)
    net = Network(y + y.T, x, node_ids=['n1', 'n2', 'n3', 'n4', 'n5'], covariate_names=['w'])
    write_edge_list(str(tmp_path / 'e.txt'), net)
    write_edge_covariates(str(tmp_path / 'x.csv'), net)
    back = read_network(str(tmp_path / 'e.txt'), str(tmp_path / 'x.csv'), nodes=list(net.node_ids))
    npt.assert_array_equal(back.adjacency, net.adjacency)
    npt.assert_allclose(back.covariates, net.covariates)
