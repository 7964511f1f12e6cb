"""
Unit tests for random streams, closed forms, output writing and hashing
"""
import json
import os

import numpy as np
import pytest

from errors import DomainError
from models import RadialProfile, RunManifest
from services import OutputWriter, block_generator, block_ranges, map_blocks, read_json, render_table
from services import stable_ball
from services.quadrature import levy_khintchine_integral
from utils.hashing import canonical_hash, canonical_json, file_hash


def test_block_generator_is_keyed():
    """Same (seed, block, stream) gives the same draws; any change gives others"""
    base = block_generator(7, 0).standard_normal(5)
    assert np.array_equal(base, block_generator(7, 0).standard_normal(5))
    assert not np.array_equal(base, block_generator(7, 1).standard_normal(5))
    assert not np.array_equal(base, block_generator(7, 0, stream=1).standard_normal(5))
    assert not np.array_equal(base, block_generator(8, 0).standard_normal(5))


def test_block_ranges_cover_paths():
    ranges = block_ranges(10, 4)
    assert ranges == [(0, 0, 4), (1, 4, 8), (2, 8, 10)]
    assert block_ranges(0, 4) == []


def test_map_blocks_independent_of_workers():
    """Thread count never changes the result"""
    def draw(rng, block, size):
        return rng.uniform(size=size)

    serial = np.concatenate(map_blocks(draw, 5000, seed=3, block_size=512, workers=1))
    threaded = np.concatenate(map_blocks(draw, 5000, seed=3, block_size=512, workers=4))
    assert np.array_equal(serial, threaded)
    assert serial.size == 5000


def test_stable_constants():
    """A_{1,1} = 1/π and the Cauchy density at the origin is 1/π"""
    assert stable_ball.stable_constant(1, 1.0) == pytest.approx(1.0 / np.pi)
    assert float(stable_ball.cauchy_density(1, 1.0, 0.0)) == pytest.approx(1.0 / np.pi)
    assert stable_ball.riesz_constant(3, 1.0) == pytest.approx(1.0 / (2.0 * np.pi ** 2))
    with pytest.raises(ValueError):
        stable_ball.stable_constant(1, 2.5)


def test_cauchy_exit_time_mean_closed_form():
    """E^x τ_{(-1,1)} = √(1 - x²) for the Cauchy process"""
    assert stable_ball.exit_time_mean(1.0, 1, 1.0, (0.6,)) == pytest.approx(0.8)


def test_poisson_kernel_half_mass():
    """From the center the exit lands right of the ball with probability 1/2"""
    mass = stable_ball.harmonic_measure_box(1.0, 1, 1.0, (0.0,), (1.0,), (np.inf,))
    assert mass == pytest.approx(0.5, abs=1e-6)


def test_render_table_aligns():
    text = render_table(('name', 'value'), [('a', 1.0), ('long_name', 0.5)])
    lines = text.splitlines()
    assert len(lines) == 4
    assert len({len(line) for line in lines}) == 1


def test_output_writer_records_outputs(output_dir):
    """Written files land on the manifest; the manifest never lists itself"""
    manifest = RunManifest(command='density', spec_id='cauchy', parameters={'t': 1.0}, seed=None)
    writer = OutputWriter(output_dir, manifest)
    grid = np.geomspace(0.1, 10.0, 5)
    paths = writer.write_profile(RadialProfile(grid=grid, values=1.0 / (1.0 + grid ** 2), d=1), 'p')
    writer.write_json('extra.json', {'value': np.float64(0.25)})
    manifest_path = writer.write_manifest()

    assert all(os.path.exists(p) for p in paths)
    stored = read_json(manifest_path)
    assert stored['outputs'] == ['p.csv', 'p.json', 'extra.json']
    assert read_json(writer.path('extra.json')) == {'value': 0.25}
    with open(paths[0], encoding='utf-8') as handle:
        assert handle.readline().strip() == 'r,value'


def test_canonical_hash_ignores_key_order():
    assert canonical_json({'b': 1, 'a': 2}) == '{"a":2,"b":1}'
    assert canonical_hash({'b': 1, 'a': 2}) == canonical_hash({'a': 2, 'b': 1})
    assert len(canonical_hash([])) == 64


def test_file_hash_matches_contents(tmp_path):
    first = tmp_path / 'a.json'
    second = tmp_path / 'b.json'
    first.write_text(json.dumps({'x': 1}))
    second.write_text(json.dumps({'x': 1}))
    assert file_hash(str(first)) == file_hash(str(second))
    second.write_text(json.dumps({'x': 2}))
    assert file_hash(str(first)) != file_hash(str(second))


def test_levy_khintchine_cauchy():
    """ν(r) = 1/(πr²) on the line gives ψ(R) = R"""
    value = levy_khintchine_integral(lambda r: 1.0 / (np.pi * np.asarray(r) ** 2), 1, 2.0)
    assert value == pytest.approx(2.0, rel=1e-5)


def test_levy_khintchine_rejects_singular_origin():
    """r^{-3.5} on the line is not integrable against r² at 0"""
    with pytest.raises(DomainError) as info:
        levy_khintchine_integral(lambda r: np.asarray(r) ** -3.5, 1, 1.0)
    assert info.value.details['end'] == 'zero'
    assert info.value.exit_code == 3


def test_levy_khintchine_rejects_heavy_tail():
    with pytest.raises(DomainError) as info:
        levy_khintchine_integral(lambda r: np.asarray(r) ** -0.5, 1, 1.0)
    assert info.value.details['end'] == 'infinity'


def test_levy_khintchine_compact_support_skips_tail():
    """A tail check is pointless once ν vanishes beyond its support"""
    def nu(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < 1.0, r ** -2.0, 0.0)

    assert levy_khintchine_integral(nu, 1, 1.0, breakpoints=(1.0,), support=1.0) > 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
