import shutil
import subprocess

import pytest

from frobmult import paperdata as pd
from frobmult.exactlin import rank
from frobmult.homology import PolyMatrix, coker_length, free_resolution

# (shape, row weights, column weights); frozen after the first verified load so a
# transcription slip in any 0/1 entry changes at least one profile
PROFILES = {
    "d3": ((15, 24), [1] * 15, [0] * 8 + [1] * 7 + [0] + [1] * 8),
    "d4": ((15, 24), [2, 2, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0, 0, 1, 1],
           [1] * 8 + [0] * 4 + [1, 0, 0, 1] + [0] * 4 + [1] * 4),
    "d5": ((15, 24), [0] * 4 + [1] * 9 + [0, 0], [0] * 15 + [1] * 9),
    "d6": ((15, 24), [1] * 15, [1] * 15 + [0] * 9),
    "c6": ((4, 24), [1] * 4, [0] * 20 + [1] * 4),
}


def test_manifest_checksums():
    man = pd.read_manifest()
    assert set(man) == set(pd.DATA_FILES)
    for name in pd.DATA_FILES:
        pd.read_asset(name)
    assert len(pd.assets_hash()) == 40


def test_corrupted_asset_is_rejected(monkeypatch):
    real = pd.read_manifest()
    fake = dict(real, **{"psi/a1.mat": "0" * 40})
    monkeypatch.setattr(pd, "read_manifest", lambda: fake)
    with pytest.raises(pd.AssetError):
        pd.read_asset("psi/a1.mat")
    with pytest.raises(pd.AssetError):
        pd.read_asset("rings/none.ring")


def test_blob_hash_is_git_compatible():
    git = shutil.which("git")
    if git is None:
        pytest.skip("git not installed")
    path = pd._data_root() / "psi" / "d4.mat"
    out = subprocess.run([git, "hash-object", str(path)], capture_output=True, text=True, check=True)
    assert pd.blob_hash(path.read_bytes()) == out.stdout.strip()


@pytest.mark.parametrize("kind, shape", [("a", (4, 12)), ("b", (12, 24)), ("c", (4, 24)), ("d", (15, 24))])
def test_block_shapes(kind, shape):
    for i in range(1, 7):
        assert pd.block_matrix(kind, i).shape == shape


@pytest.mark.parametrize("name", sorted(PROFILES))
def test_weight_profiles(name):
    m = pd.block_matrix(name[0], int(name[1]))
    shape, rows, cols = PROFILES[name]
    assert m.shape == shape
    assert [sum(r) for r in m.tolist()] == rows
    assert [sum(c) for c in zip(*m.tolist())] == cols


def test_a_b_products_commute():
    blocks = pd.psi_blocks()
    a, b = blocks["a"], blocks["b"]
    for i in range(6):
        for j in range(6):
            assert a[i] @ b[j] == a[j] @ b[i]


def test_N_is_a_module_over_A(A, N):
    assert N.dim == sum(pd.BLOCK_SIZES) == 55
    N.check(A.relations)


def test_N_over_other_primes_keeps_ranks():
    for p in (3, 5):
        assert rank(pd.alpha(p)) == 112 and rank(pd.beta(p)) == 108


def test_alpha_is_phi3_on_N():
    assert pd.alpha() == pd.theta(3)
    assert pd.beta() == pd.theta(4)
    assert (pd.alpha() @ pd.beta()).is_zero()


def test_ideals():
    assert pd.named_ideal("P").generators == ("u", "v", "w")
    assert pd.named_ideal("Q").generators == ("x", "v", "w")
    with pytest.raises(KeyError):
        pd.named_ideal("Z")


def test_phi_complex_resolves_AmodP(A):
    phi = pd.build_phi_complex()
    assert phi.notes["resolves"] == "A/P"
    assert coker_length(phi.d(1)) == float("inf")
    computed = free_resolution(pd.ideal_complex(["u", "v", "w"], A), 6)
    assert computed.ranks() == phi.ranks(6)


def test_R_presentation(R):
    assert R.names == pd.A_VARS + pd.R_EXTRA
    assert len(R.relations) == 20
    assert R.p == 2


def test_R_over_A_presentation():
    rel = pd.r_over_A()
    assert (rel.rows, rel.cols) == (6, 4)
    assert all(f.max_degree() <= 1 for row in rel.entries for f in row)


def test_exact_sequence_holds():
    rep = pd.check_exact_sequence()
    assert rep.ok
    assert rep.well_defined and rep.image_is_P and rep.kernel_generated and rep.kernel_free


def test_exact_sequence_detects_a_wrong_map():
    good = pd.build_R_to_P_map()
    A = good.A
    # send c to x instead of w: not well defined and the image is not P
    bad = pd.RtoPMap(A, good.generators, good.relations,
                     [A.parse(s) for s in ("0", "u", "v", "x", "0", "0")])
    rep = pd.check_exact_sequence(bad)
    assert not rep.ok
    assert not rep.image_is_P
    # claim a kernel generator that is not in the kernel
    wrong_kernel = pd.RtoPMap(A, good.generators, good.relations, good.images, kernel_generators=("1", "d"))
    assert not pd.check_exact_sequence(wrong_kernel).kernel_generated
