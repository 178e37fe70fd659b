import os

import numpy as np
from numpy.testing import assert_array_equal
import pytest
import yaml

import io_utils
import ui
from displacement import uniform_displacement_field, KEYING_COORDINATE
from fixtures import write_fixture
from geometry import segment_at_intersections
from utils import ConfigError, DisplacementError, GeometryError
from test.shapes import unit_square, quarter_circle


def _write(path, text):
    with open(str(path), 'w') as f:
        f.write(text)
    return str(path)


def _config(tmp_path, doc):
    paths = write_fixture(str(tmp_path / 'fx'))
    base = io_utils.load_yaml(paths['config'])
    base.update(doc)
    target = str(tmp_path / 'fx' / 'run.yaml')
    with open(target, 'w') as f:
        yaml.dump(base, f)
    return target


def test_geometry_round_trip(tmp_path):
    geo = unit_square(3, transform=lambda p: p * (1. / 3., 0.7), split=True)
    csv_path, side = io_utils.write_geometry(geo, str(tmp_path / 'g.csv'))
    assert side == str(tmp_path / 'g.yaml')
    back = io_utils.read_geometry(csv_path)
    assert back.stage_time == 3
    assert back.curve_ids == geo.curve_ids
    for cid in geo.curve_ids:
        assert_array_equal(back.curve(cid).points, geo.curve(cid).points)
    assert back.subdomains == geo.subdomains


def test_geometry_read_errors(tmp_path):
    bad_header = _write(tmp_path / 'a.csv', "id,i,x,y\nc,0,0,0\n")
    with pytest.raises(GeometryError):
        io_utils.read_geometry(bad_header)
    gap = _write(tmp_path / 'b.csv',
                 "curve_id,point_index,x,y\nc,0,0,0\nc,2,1,0\n")
    _write(tmp_path / 'b.yaml', "stage_time: 0\n")
    with pytest.raises(GeometryError):
        io_utils.read_geometry(gap)
    ok = _write(tmp_path / 'c.csv',
                "curve_id,point_index,x,y\nc,1,1,0\nc,0,0,0\n")
    _write(tmp_path / 'c.yaml', "stage_time: 0\ncolour: red\n")
    with pytest.raises(GeometryError):
        io_utils.read_geometry(ok)
    _write(tmp_path / 'c.yaml', "stage_time: 2\n")
    assert_array_equal(io_utils.read_geometry(ok).curve('c').points,
                       [(0, 0), (1, 0)])


def test_write_segments(tmp_path):
    seg = segment_at_intersections(unit_square(split=True))
    path = str(tmp_path / 'segments.csv')
    io_utils.write_segments(seg, path)
    lines = open(path).read().splitlines()
    assert lines[0] == ",".join(io_utils.SEGMENT_HEADER)
    bottom = [l.split(',') for l in lines[1:] if l.startswith('bottom,')]
    assert [(r[1], r[2], r[5]) for r in bottom] == [
        ('0', '0', '1'), ('0', '1', '1'), ('1', '0', '1'), ('1', '1', '1')]


def test_parse_segment_id():
    assert io_utils.parse_segment_id('outer:2') == ('outer', 2)
    assert io_utils.parse_segment_id('outer') == ('outer', None)
    assert io_utils.parse_segment_id('a:b') == ('a:b', None)


def test_displacement_table_round_trip(tmp_path):
    field = uniform_displacement_field(quarter_circle(50),
                                       quarter_circle(80, 1.25), 7)
    path = str(tmp_path / 'd.csv')
    io_utils.write_displacement([field], path)
    (back,) = io_utils.read_displacement(path)
    assert back.segment_ref == ('arc', None)
    assert_array_equal(back.params, field.params)
    assert_array_equal(back.displacement, field.displacement)


def test_displacement_table_coordinate_keys(tmp_path):
    seg = segment_at_intersections(unit_square(split=True))
    fields = [uniform_displacement_field(s, s, 4, KEYING_COORDINATE)
              for s in seg.all_segments()]
    path = str(tmp_path / 'd.csv')
    io_utils.write_displacement(fields, path)
    back = io_utils.read_displacement(path)
    assert [f.segment_id for f in back] == [f.segment_id for f in fields]
    for a, b in zip(back, fields):
        assert a.keying == KEYING_COORDINATE
        assert_array_equal(a.source, b.source)


def test_displacement_table_errors(tmp_path):
    header = ",".join(io_utils.DISPLACEMENT_HEADER) + "\n"
    path = _write(tmp_path / 'd.csv', header + "a:0,angle,0,,1,1\n")
    with pytest.raises(DisplacementError):
        io_utils.read_displacement(path)
    path = _write(tmp_path / 'e.csv',
                  header + "a:0,parameter,0,,1,1\na:0,coordinate,1,1,0,0\n")
    with pytest.raises(DisplacementError):
        io_utils.read_displacement(path)


def test_load_config_defaults(tmp_path):
    paths = write_fixture(str(tmp_path))
    config = ui.load_config(paths['config'])
    assert config.mode == 'model2'
    assert config.network == 'limb_bud'
    assert config.stages == [paths['geometry_t'], paths['geometry_t1']]
    assert config.geometry_t == paths['geometry_t']
    assert (config.solver.dt, config.solver.t_end) == (0.01, 1.)
    assert config.solver.strict_mesh is False
    assert config.keying == 'parameter'
    assert config.target_edge_length is None
    assert config.output_dir == os.path.join(str(tmp_path), 'out')
    assert config.output.formats == ui.DEFAULT_FORMATS
    assert config.params == {}


def test_load_config_overrides(tmp_path):
    path = _config(tmp_path, {'output': {'dir': 'res', 'vtk_every': 5}})
    config = ui.load_config(path, mode='model1', out='elsewhere',
                            strict_mesh=True)
    assert config.mode == 'model1'
    assert config.output_dir == 'elsewhere'
    assert config.solver.strict_mesh is True
    assert 'vtk' in config.output.formats
    assert config.output.vtk_every == 5


def test_load_config_lists_unknown_keys(tmp_path):
    path = _config(tmp_path, {'colour': 'red',
                              'solver': {'dt': 0.1, 'speed': 2},
                              'params': {'rho_A': 1., 'rho_X': 2.}})
    with pytest.raises(ConfigError) as e:
        ui.load_config(path)
    assert sorted(e.value.unknown) == ['colour', 'params.rho_X',
                                       'solver.speed']


@pytest.mark.parametrize('doc, field', [
    ({'solver': {'dt': -1.}}, 'solver.dt'),
    ({'solver': {'dt': 'fast'}}, 'solver.dt'),
    ({'solver': {'strict_mesh': 'yes'}}, 'solver.strict_mesh'),
    ({'mode': 'model3'}, 'mode'),
    ({'network': 'gierer_meinhardt'}, 'network'),
    ({'params': {'K_AB': -1.}}, 'params'),
    ({'output': {'formats': ['areas', 'movie']}}, 'output.formats'),
    ({'geometry': {'stage_t': 'missing.csv', 'stage_t1': 'missing.csv'}},
     'geometry.stage_t'),
    ({'geometry': {'stages': ['geometry_t.csv']}}, 'geometry.stages'),
])
def test_load_config_invalid_values(tmp_path, doc, field):
    with pytest.raises(ConfigError) as e:
        ui.load_config(_config(tmp_path, doc))
    assert e.value.path == field
    assert str(e.value).startswith(field)
