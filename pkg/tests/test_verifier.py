from fractions import Fraction

import numpy as np
import pytest

from subbary.models.errors import DegenerateBody, DomainError, GenerationExhausted, InvalidConfig
from subbary.models.suite import SUITES, SuiteConfig, SuiteResult
from subbary.services.verifier import STRUCTURED_KINDS, PropertyVerifier

SMALL = dict(
    seed=7,
    bodies=3,
    dims=(2, 3),
    vertices_per_body=(4, 6),
    t_grid=4,
    profiles=3,
    profile_dims=(1, 2),
    profile_t_grid=5,
    okounkov_bodies=3,
    tau_grid=5,
    curve_tau_grid=9,
    mc_bodies=2,
    mc_samples=20_000,
)


@pytest.fixture
def verifier(kernel):
    return PropertyVerifier(kernel)


@pytest.fixture(scope="module")
def small_config():
    return SuiteConfig(**SMALL)


class TestGenerators:
    def test_rng_is_reproducible(self):
        a = PropertyVerifier.rng(1, "gen-hammer", 3).random(4)
        b = PropertyVerifier.rng(1, "gen-hammer", 3).random(4)
        c = PropertyVerifier.rng(1, "gen-hammer", 4).random(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_gen_body_is_full_dimensional(self, verifier, n):
        rng = np.random.default_rng(n)
        for _ in range(5):
            body = verifier.gen_body(rng, n, n + 3)
            assert body.dim == n
            assert body.volume > 0

    def test_gen_body_needs_enough_vertices(self, verifier):
        with pytest.raises(DomainError):
            verifier.gen_body(np.random.default_rng(0), 3, 3)

    def test_structured_bodies(self, verifier):
        assert verifier.structured_body("cube", 3).volume == 1
        assert verifier.structured_body("simplex", 3).volume == Fraction(1, 6)
        assert verifier.structured_body("cross-polytope", 2).volume == 2
        assert verifier.structured_body("cross-polytope", 3).volume == Fraction(4, 3)
        clipped = verifier.structured_body("clipped-simplex", 2, np.random.default_rng(3))
        assert clipped.volume > 0

    def test_every_structured_kind_builds(self, verifier):
        for kind in STRUCTURED_KINDS:
            assert verifier.structured_body(kind, 2).dim == 2

    def test_unknown_structured_kind(self, verifier):
        with pytest.raises(DomainError):
            verifier.structured_body("dodecahedron", 3)

    def test_exhausted_generator(self, monkeypatch):
        verifier = PropertyVerifier()

        def degenerate(points, dim):
            raise DegenerateBody("flat")

        monkeypatch.setattr(verifier.kernel, "build", degenerate)
        with pytest.raises(GenerationExhausted):
            verifier.gen_okounkov_body(np.random.default_rng(0), 2, 4)

    def test_okounkov_bodies_live_in_the_orthant(self, verifier):
        rng = np.random.default_rng(11)
        plain = verifier.gen_okounkov_body(rng, 3, 6)
        shifted = verifier.gen_okounkov_body(rng, 3, 6, translate=True)
        assert min(v[0] for v in plain.vertices) >= 0
        assert min(v[0] for v in shifted.vertices) > 0

    def test_gen_profile_is_concave_and_non_negative(self, verifier):
        rng = np.random.default_rng(5)
        for pieces in range(1, 8):
            f = verifier.gen_profile(rng, pieces)
            assert f.breakpoints[0] == 0.0 and f.breakpoints[-1] == f.T
            assert min(f.values) >= 0
            assert max(f.values) > 0
            slopes = f.slopes
            assert all(b <= a + 1e-9 for a, b in zip(slopes, slopes[1:]))


class TestInstances:
    @pytest.mark.parametrize("suite", SUITES)
    def test_instance_passes(self, verifier, small_config, suite):
        result = verifier.run_instance(suite, small_config, 1)
        assert result.checks_run > 0
        assert result.passed, result.violations

    def test_instance_is_deterministic(self, verifier, small_config):
        first = verifier.run_instance("gen-hammer", small_config, 2)
        second = verifier.run_instance("gen-hammer", small_config, 2)
        assert first.digest() == second.digest()

    def test_constant_profile_first(self, verifier, small_config):
        result = verifier.run_instance("functional-nh", small_config, 0)
        assert "functional-nh.equality" in result.min_slack
        assert result.min_slack["functional-nh.equality"] == pytest.approx(0.0, abs=1e-12)

    def test_instance_counts(self, verifier, small_config):
        assert verifier.instance_count(small_config, "weighted-nh") == 3
        assert verifier.instance_count(small_config, "mc-oracle") == 2
        assert verifier.instance_count(small_config, "mass-balance") == 3


class TestRunSuite:
    def test_all_suites_pass(self, verifier, small_config):
        result = verifier.run_suite(small_config, "all")
        assert result.suite == "all"
        assert result.passed, result.violations
        prefixes = {check.split(".")[0] for check in result.min_slack}
        assert {"gen-hammer", "functional-nh", "fujita-2", "mc-oracle"} <= prefixes

    def test_digest_is_reproducible(self, verifier, small_config):
        a = verifier.run_suite(small_config, "fujita-1")
        b = verifier.run_suite(small_config, "fujita-1")
        assert a.digest() == b.digest()
        assert a.runtime >= 0

    def test_seed_changes_digest(self, verifier, small_config):
        other = SuiteConfig(**{**SMALL, "seed": 8})
        assert verifier.run_suite(small_config, "gen-hammer").digest() != \
            verifier.run_suite(other, "gen-hammer").digest()

    def test_workers_do_not_change_the_result(self, verifier, small_config):
        pooled = SuiteConfig(**{**SMALL, "workers": 2})
        assert verifier.run_suite(small_config, "mass-balance").digest() == \
            verifier.run_suite(pooled, "mass-balance").digest()

    def test_gen_hammer_has_a_tight_witness(self, verifier):
        config = SuiteConfig(**{**SMALL, "bodies": 6, "t_grid": 8})
        result = verifier.run_suite(config, "gen-hammer")
        assert result.passed, result.violations
        tightest = min(result.min_slack["gen-hammer.ge"], result.min_slack["gen-hammer.le"])
        assert -config.tolerance <= tightest < 1e-2

    def test_five_dimensional_bodies_stay_fast(self, verifier):
        config = SuiteConfig(**{**SMALL, "bodies": 2, "dims": (5,), "vertices_per_body": (12, 12), "t_grid": 32})
        result = verifier.run_suite(config, "gen-hammer")
        assert result.passed, result.violations
        assert result.runtime < 60

    def test_profile_suites_stay_fast(self, verifier):
        config = SuiteConfig(**{**SMALL, "profiles": 4, "profile_dims": (1, 2, 3, 4, 5, 6), "profile_t_grid": 64})
        runtime = sum(verifier.run_suite(config, suite).runtime for suite in ("functional-nh", "weighted-nh"))
        assert runtime < 10

    def test_unknown_suite(self, verifier, small_config):
        with pytest.raises(DomainError):
            verifier.run_suite(small_config, "nope")

    @pytest.mark.slow
    def test_default_sizes_within_budget(self, verifier):
        config = SuiteConfig(workers=4)
        runtimes = {}
        for suite in SUITES:
            result = verifier.run_suite(config, suite)
            assert result.passed, (suite, result.violations[:5])
            runtimes[suite] = result.runtime
            if suite == "gen-hammer":
                assert min(result.min_slack["gen-hammer.ge"], result.min_slack["gen-hammer.le"]) < 1e-2
        assert runtimes["gen-hammer"] + runtimes["classical-nh-limits"] < 300, runtimes
        assert runtimes["functional-nh"] + runtimes["weighted-nh"] < 60, runtimes
        assert runtimes["fujita-1"] + runtimes["fujita-2"] < 180, runtimes
        assert sum(runtimes.values()) < 600, runtimes


class TestSuiteResult:
    def test_record_tracks_minimum_and_violations(self):
        result = SuiteResult("demo")
        result.record("c", 0.5, "k1", 1e-9)
        result.record("c", -1e-12, "k2", 1e-9)
        result.record("c", -0.1, "k3", 1e-9)
        assert result.checks_run == 3
        assert result.min_slack["c"] == -0.1
        assert [v.inputs_digest for v in result.violations] == ["k3"]
        assert not result.passed

    def test_digest_ignores_runtime(self):
        a, b = SuiteResult("demo"), SuiteResult("demo")
        for result in (a, b):
            result.record("c", 0.25, "k", 0.0)
        a.runtime, b.runtime = 1.0, 2.0
        assert a.digest() == b.digest()
        assert "runtime" not in a.to_dict(include_meta=False)

    def test_merge(self):
        a, b = SuiteResult("demo"), SuiteResult("demo")
        a.record("c", 0.3, "k", 0.0)
        b.record("c", 0.1, "k", 0.0)
        b.record("d", -1.0, "k", 0.0)
        a.merge(b)
        assert a.checks_run == 3
        assert a.min_slack == {"c": 0.1, "d": -1.0}
        assert len(a.violations) == 1


class TestSuiteConfig:
    def test_rejects_bad_sizes(self):
        with pytest.raises(InvalidConfig):
            SuiteConfig(bodies=0)
        with pytest.raises(InvalidConfig):
            SuiteConfig(dims=(1, 2))
        with pytest.raises(InvalidConfig):
            SuiteConfig(weights=(-1.0,))
        with pytest.raises(InvalidConfig):
            SuiteConfig(vertices_per_body=(5, 3))

    def test_lists_become_tuples(self):
        config = SuiteConfig(dims=[2, 3], weights=[1, 2])
        assert config.dims == (2, 3)
        assert config.weights == (1.0, 2.0)
