import json

import pytest

import enhomology.twist
from enhomology.algdata import trivial_algebra, trivial_coefficients, truncated_polynomial, unital_extension
from enhomology.coeff import RATIONALS, prime_field
from enhomology.config import SCHEMA_VERSION
from enhomology.errors import SchemaError
from enhomology.homcalc import EDGE_NOTE, TSV_COLUMNS, d_squared_check, homology_table, stability_scan
from enhomology.treecomb import theta_deletions
from enhomology.twist import assemble_homology_complex


def test_dual_numbers_have_one_class_per_degree(dual_numbers):
    c = assemble_homology_complex(dual_numbers, trivial_coefficients(dual_numbers), 1, 7, RATIONALS)
    table = homology_table(c)
    assert table.betti_numbers(exact_only=True) == {d: 1 for d in range(7)}
    assert table.row(7).edge
    assert not table.row(6).edge


def test_table_serialization(trunc3):
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 1, 3, RATIONALS)
    table = homology_table(c)
    document = json.loads(table.to_json())
    assert document['schema_version'] == SCHEMA_VERSION
    assert document['metadata']['n'] == 1
    assert document['metadata']['edge_degrees'] == [3]
    rows = document['rows']
    assert [r['degree'] for r in rows] == [0, 1, 2, 3]
    assert rows[-1]['note'] == EDGE_NOTE
    assert 'note' not in rows[0]
    for r in rows:
        assert r['betti'] == r['cycles'] - r['boundaries']

    lines = table.to_tsv().splitlines()
    assert lines[0].startswith("# edge degrees 3")
    assert lines[1].split('\t') == list(TSV_COLUMNS)
    assert len(lines) == 2 + len(rows)


def test_threaded_table_matches_serial(trunc3):
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 2, 4, prime_field(3), jobs=3)
    serial = assemble_homology_complex(trunc3, unital_extension(trunc3), 2, 4, prime_field(3))
    assert homology_table(c, jobs=3) == homology_table(serial)


def test_clean_complex_passes_the_audit(trunc3):
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 2, 3, RATIONALS)
    report = d_squared_check(c)
    assert report.clean
    assert report.checked == 3
    assert report.degree is None


def test_flipped_twist_sign_is_caught(monkeypatch, trunc3):
    def flipped(tree):
        return [d if d.is_min else d._replace(sign=-d.sign) for d in theta_deletions(tree)]

    monkeypatch.setattr(enhomology.twist, 'theta_deletions', flipped)
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 1, 2, RATIONALS, check=False)
    report = d_squared_check(c)
    assert not report.clean
    assert report.degree == 2
    assert report.checked == 2
    assert report.value not in (None, "0")
    assert report.to_dict()['row_element'] == report.row_element


def test_stability_in_degree_zero(trunc3):
    scan = stability_scan(trunc3, trivial_coefficients(trunc3), 0, 3, RATIONALS)
    assert scan.rows == [(1, 1), (2, 1), (3, 1)]
    assert scan.stable
    assert scan.last_change is None
    assert scan.to_dict()['label'] == "observed"


def test_stability_scan_shape():
    A = trivial_algebra(1, [0])
    scan = stability_scan(A, trivial_coefficients(A), 2, 3, RATIONALS)
    assert [n for n, _ in scan.rows] == [1, 2, 3]
    assert all(b >= 0 for _, b in scan.rows)
    assert scan.stable == (scan.rows[-1][1] == scan.rows[-2][1])
    document = scan.to_dict()
    assert document['schema_version'] == SCHEMA_VERSION
    assert document['degree'] == 2


def test_stability_scan_needs_a_level():
    A = truncated_polynomial(3)
    with pytest.raises(SchemaError):
        stability_scan(A, trivial_coefficients(A), 1, 0, RATIONALS)


def test_single_level_scan_is_trivially_stable(trunc3):
    scan = stability_scan(trunc3, trivial_coefficients(trunc3), 0, 1, RATIONALS)
    assert scan.rows == [(1, 1)]
    assert scan.stable
    assert scan.last_change is None
