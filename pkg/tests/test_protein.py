import io
import json

import numpy as np
import pytest

from pslap.errors import (
    GridMismatch,
    InputError,
    MalformedRecord,
    ResidueIdentityMismatch,
    ResidueNotFound,
)
from pslap.filtration import build_vr
from pslap.geometry import DistanceSpec, pairwise_distances
from pslap.protein import (
    EmptyNeighborhoodWarning,
    FeatureConfig,
    MutationSpec,
    PqrAtom,
    feature_layout,
    featurize_site,
    element_pair_sets,
    infer_element,
    parse_pqr,
    parse_pqr_lines,
    select_atom_sets,
    stats_block,
    write_features_csv,
)


def _atom(serial, name, res_name, chain, res_num, x, y, z, charge=0.1):
    return PqrAtom(
        record="ATOM", serial=serial, name=name, residue_name=res_name,
        chain_id=chain, residue_number=res_num, x=x, y=y, z=z,
        charge=charge, radius=1.5, element=infer_element(name),
    )


# ---- parsing -----------------------------------------------------------


def test_parse_standard_line():
    atoms = parse_pqr_lines(["ATOM 1 N MET A 1 1.0 2.0 3.0 -0.3 1.55"])
    assert len(atoms) == 1
    a = atoms[0]
    assert (a.serial, a.name, a.residue_name, a.chain_id, a.residue_number) == (
        1, "N", "MET", "A", 1,
    )
    assert (a.x, a.y, a.z, a.charge, a.radius) == (1.0, 2.0, 3.0, -0.3, 1.55)
    assert a.element == "N"


def test_parse_chainless_line():
    atoms = parse_pqr_lines(["ATOM 7 CA GLY 12 0.5 0.5 0.5 0.10 1.70"])
    assert atoms[0].chain_id == ""
    assert atoms[0].residue_number == 12
    assert atoms[0].element == "C"


def test_parse_skips_non_atom_records():
    lines = ["REMARK hello", "", "TER", "END", "ATOM 1 N ALA A 1 0 0 0 0.1 1.5"]
    assert len(parse_pqr_lines(lines)) == 1


def test_parse_hetatm_records_kept():
    atoms = parse_pqr_lines(["HETATM 9 O HOH A 101 1 2 3 -0.8 1.4"])
    assert atoms[0].record == "HETATM"


def test_parse_rejects_nine_fields():
    with pytest.raises(MalformedRecord) as err:
        parse_pqr_lines(["junk", "ATOM 1 N MET A 1 1.0 2.0 -0.3"])
    assert err.value.line_no == 2


def test_parse_rejects_non_numeric():
    with pytest.raises(MalformedRecord) as err:
        parse_pqr_lines(["ATOM 1 N MET A one 1.0 2.0 3.0 -0.3 1.55"])
    assert err.value.line_no == 1


def test_element_inference():
    assert infer_element("CA") == "C"
    assert infer_element("NE2") == "N"
    assert infer_element("OXT") == "O"
    assert infer_element("1HB") == "H"
    assert infer_element("2H") == "H"
    assert infer_element("SG") == "S"
    assert infer_element("123") == ""


def test_parse_pqr_reads_fixture_files(wt_path, mt_path):
    wt, mt = parse_pqr(wt_path), parse_pqr(mt_path)
    assert len(wt) == 27
    assert len(mt) == 22
    assert {a.element for a in wt} == {"C", "N", "O"}


# ---- mutation spec -----------------------------------------------------


def test_mutation_parse_roundtrip():
    m = MutationSpec.parse("A:39:Q:G")
    assert (m.chain, m.position, m.wt_res, m.mt_res) == ("A", 39, "Q", "G")
    assert m.label == "A:39:Q:G"


def test_mutation_parse_rejects_bad_input():
    for text in ("A:39:Q", "A:x:Q:G", ":39:Q:G", "A:39:Z:G", "A:39:Q:G:extra"):
        with pytest.raises(InputError):
            MutationSpec.parse(text)


def test_mutation_parse_lowercase_normalized():
    assert MutationSpec.parse("B:7:q:g").label == "B:7:Q:G"


# ---- selection ---------------------------------------------------------


def test_select_atom_sets_applies_cutoff_inclusively():
    atoms = [
        _atom(1, "CA", "ALA", "A", 1, 0.0, 0.0, 0.0),
        _atom(2, "CA", "GLY", "A", 2, 16.0, 0.0, 0.0),   # exactly at the cutoff
        _atom(3, "CA", "GLY", "A", 3, 16.001, 0.0, 0.0),  # just outside
        _atom(4, "1HB", "ALA", "A", 1, 0.5, 0.0, 0.0),    # hydrogen, dropped
    ]
    site, env = select_atom_sets(atoms, "A", 1, FeatureConfig())
    assert [a.serial for a in site] == [1]
    assert [a.serial for a in env] == [2]


def test_select_atom_sets_missing_residue():
    atoms = [_atom(1, "CA", "ALA", "A", 1, 0, 0, 0)]
    with pytest.raises(ResidueNotFound):
        select_atom_sets(atoms, "B", 1, FeatureConfig())
    with pytest.raises(ResidueNotFound):
        select_atom_sets(atoms, "A", 9, FeatureConfig())


def test_select_atom_sets_warns_on_empty_neighborhood():
    atoms = [
        _atom(1, "CA", "ALA", "A", 1, 0, 0, 0),
        _atom(2, "CA", "GLY", "A", 2, 99.0, 0, 0),
    ]
    with pytest.warns(EmptyNeighborhoodWarning):
        site, env = select_atom_sets(atoms, "A", 1, FeatureConfig())
    assert env == []


# ---- layout and config -------------------------------------------------


def test_default_config_values():
    cfg = FeatureConfig()
    assert cfg.cutoff == 16.0
    assert cfg.grid == (3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0)
    assert cfg.delta == 0.0
    assert cfg.elements == ("C", "N", "O")
    assert cfg.block_size == 63
    assert cfg.n_features == 3402


def test_config_validation():
    with pytest.raises(InputError):
        FeatureConfig(cutoff=-1.0)
    with pytest.raises(InputError):
        FeatureConfig(grid=())
    with pytest.raises(InputError):
        FeatureConfig(grid=(3.0, 3.0))
    with pytest.raises(InputError):
        FeatureConfig(delta=-0.5)


def test_element_pairs_order():
    pairs = element_pair_sets(("C", "N", "O"))
    assert len(pairs) == 9
    assert pairs[0] == ("C", "C")
    assert pairs[1] == ("C", "N")
    assert pairs[-1] == ("O", "O")


def test_feature_layout_names_unique_and_sized():
    layout = feature_layout(FeatureConfig())
    assert len(layout) == 3402
    assert len(set(layout)) == 3402
    assert layout[0] == "wt.vr_q0.CC.betti.t3"
    assert layout[7] == "wt.vr_q0.CC.max.t3"
    assert layout[63].startswith("wt.vr_q0.CN.")
    assert layout[1134].startswith("mt.")
    assert layout[2268].startswith("diff.")


def test_stats_block_shape_and_grid_check():
    from pslap.engine import psl_over_filtration
    from pslap.geometry import LabeledPointCloud, euclidean_matrix
    from pslap.sheaf import SheafWeighting

    cloud = LabeledPointCloud.from_arrays(np.array([[0.0, 0, 0], [5.0, 0, 0]]))
    fc = build_vr(euclidean_matrix(cloud), max_dim=2)
    w = SheafWeighting(charges=cloud.charges)
    grid = [3.0, 4.0, 5.0]
    sweep = psl_over_filtration(fc, cloud, w, grid)
    block = stats_block(sweep, grid)
    assert block.shape == (27,)
    assert block[:3].tolist() == [2.0, 2.0, 1.0]
    with pytest.raises(GridMismatch):
        stats_block(sweep, [3.0, 4.0])


# ---- featurize ----------------------------------------------------------


@pytest.fixture(scope="module")
def micro():
    import os

    here = os.path.dirname(__file__)
    wt = parse_pqr(os.path.join(here, "fixtures", "micro_wt.pqr"))
    mt = parse_pqr(os.path.join(here, "fixtures", "micro_mt.pqr"))
    return wt, mt


def test_featurize_full_vector(micro):
    wt, mt = micro
    vec = featurize_site(wt, mt, MutationSpec.parse("A:2:Q:G"))
    assert len(vec.values) == 3402
    assert vec.empty_channels == ()
    third = 3402 // 3
    wt_block = vec.values[:third]
    mt_block = vec.values[third : 2 * third]
    diff = vec.values[2 * third :]
    assert np.array_equal(diff, wt_block - mt_block)
    assert np.count_nonzero(wt_block) > 0
    assert np.count_nonzero(mt_block) > 0


def test_featurize_identity_checks(micro):
    wt, mt = micro
    with pytest.raises(ResidueIdentityMismatch):
        featurize_site(wt, mt, MutationSpec.parse("A:2:G:Q"))  # swapped
    with pytest.raises(ResidueIdentityMismatch):
        featurize_site(wt, mt, MutationSpec.parse("A:1:S:G"))  # residue 1 is ALA


def test_featurize_same_structure_zeroes_diff(micro):
    wt, _ = micro
    vec = featurize_site(wt, wt, MutationSpec.parse("A:2:Q:Q"))
    third = 3402 // 3
    assert np.array_equal(vec.values[2 * third :], np.zeros(third))
    assert np.array_equal(vec.values[:third], vec.values[third : 2 * third])


def test_featurize_deterministic_and_thread_invariant(micro):
    wt, mt = micro
    m = MutationSpec.parse("A:2:Q:G")
    a = featurize_site(wt, mt, m)
    b = featurize_site(wt, mt, m)
    c = featurize_site(wt, mt, m, threads=3)
    assert [repr(float(v)) for v in a.values] == [repr(float(v)) for v in b.values]
    assert [repr(float(v)) for v in a.values] == [repr(float(v)) for v in c.values]


def test_featurize_empty_channel_zero_filled():
    # mutant site is glycine stripped to a lone backbone nitrogen: its C and
    # O site selections are empty, so those channels must be zero blocks
    site_n = [_atom(1, "N", "GLY", "A", 2, 0.0, 0.0, 0.0, charge=-0.4)]
    env = [
        _atom(10, "CA", "ALA", "A", 1, 1.4, 0.2, 0.1, charge=0.03),
        _atom(11, "C", "ALA", "A", 1, 2.6, 1.0, 0.3, charge=0.59),
        _atom(12, "O", "ALA", "A", 1, 3.1, 2.0, 0.5, charge=-0.57),
        _atom(13, "N", "SER", "A", 3, 1.8, -1.2, 0.7, charge=-0.41),
        _atom(14, "CA", "SER", "A", 3, 3.0, -1.9, 1.2, charge=-0.02),
        _atom(15, "O", "SER", "A", 3, 4.4, -0.9, 2.2, charge=-0.55),
    ]
    wt_site = [
        _atom(1, "N", "ALA", "A", 2, 0.0, 0.0, 0.0, charge=-0.4),
        _atom(2, "CA", "ALA", "A", 2, 1.1, 0.9, 0.4, charge=0.03),
        _atom(3, "C", "ALA", "A", 2, 2.2, 0.3, 1.4, charge=0.6),
        _atom(4, "O", "ALA", "A", 2, 2.4, -0.9, 1.5, charge=-0.57),
        _atom(5, "CB", "ALA", "A", 2, 0.9, 2.2, -0.4, charge=-0.18),
    ]
    vec = featurize_site(wt_site + env, site_n + env, MutationSpec.parse("A:2:A:G"))
    expected_empty = {
        f"mt.{model}.{e1}{e2}"
        for model in ("vr_q0", "alpha_q1")
        for e1, e2 in element_pair_sets()
        if e1 != "N"
    }
    assert set(vec.empty_channels) == expected_empty
    layout = vec.layout
    for name in expected_empty:
        idx = [i for i, slot in enumerate(layout) if slot.startswith(name + ".")]
        assert len(idx) == 63
        assert np.array_equal(vec.values[idx], np.zeros(63))


def test_featurize_respects_custom_grid(micro):
    wt, mt = micro
    cfg = FeatureConfig(grid=(4.0, 6.0))
    vec = featurize_site(wt, mt, MutationSpec.parse("A:2:Q:G"), cfg)
    assert len(vec.values) == 3 * 2 * 9 * (2 * 9)
    assert len(vec.layout) == len(vec.values)


# ---- serialization -------------------------------------------------------


def test_feature_json_roundtrip(micro):
    wt, mt = micro
    vec = featurize_site(wt, mt, MutationSpec.parse("A:2:Q:G"))
    payload = json.loads(vec.to_json())
    assert payload["site"] == "A:2:Q:G"
    assert payload["n_features"] == 3402
    assert payload["layout_version"] == "1"
    assert len(payload["values"]) == 3402
    assert payload["values"] == [float(v) for v in vec.values]


def test_feature_csv_layout(micro):
    wt, mt = micro
    vec = featurize_site(wt, mt, MutationSpec.parse("A:2:Q:G"))
    buf = io.StringIO()
    write_features_csv([vec, vec], buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 3
    header = lines[0].split(",")
    assert header[0] == "site"
    assert len(header) == 3403
    row = lines[1].split(",")
    assert row[0] == "A:2:Q:G"
    assert float(row[1]) == vec.values[0]


def test_feature_csv_rejects_empty():
    with pytest.raises(InputError):
        write_features_csv([], io.StringIO())
