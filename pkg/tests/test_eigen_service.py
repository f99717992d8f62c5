import pytest
from scipy.special import jn_zeros

from schemas.geometry import RadialDomain, PolarGrid
from services.eigen_service import EigenService


class TestEigenService:

    @pytest.fixture(autouse=True)
    def setup_service(self):
        self.service = EigenService()

    @pytest.mark.parametrize("m,k", [(0, 1), (0, 2), (1, 1), (1, 3), (2, 1), (4, 2)])
    def test_bessel_zero_matches_scipy(self, m, k):
        assert self.service.bessel_zero(m, k) == pytest.approx(jn_zeros(m, k)[-1], abs=1e-9)

    def test_bessel_zero_rejects_invalid_indices(self):
        with pytest.raises(ValueError):
            self.service.bessel_zero(-1, 1)
        with pytest.raises(ValueError):
            self.service.bessel_zero(0, 0)

    def test_eigenpair_oracle_unit_disk(self, disk_grid):
        first = self.service.eigenpair_oracle(disk_grid.domain, disk_grid, 0, 1)
        second = self.service.eigenpair_oracle(disk_grid.domain, disk_grid, 1, 1)

        assert first.eigenvalue == pytest.approx(5.783186, abs=1e-6)
        assert second.eigenvalue == pytest.approx(14.68197, abs=1e-5)
        assert second.field.values.shape == disk_grid.shape

    def test_eigenpair_oracle_scales_with_radius(self):
        domain = RadialDomain.disk(2.0)
        grid = PolarGrid(domain=domain, nr=8, ntheta=16)

        pair = self.service.eigenpair_oracle(domain, grid, 0, 1)

        assert pair.eigenvalue == pytest.approx(5.783186 / 4.0, abs=1e-6)

    def test_eigenpair_oracle_rejects_annulus(self, annulus_grid):
        with pytest.raises(ValueError, match="disk"):
            self.service.eigenpair_oracle(annulus_grid.domain, annulus_grid, 0, 1)

    def test_eigenpair_oracle_rejects_foreign_grid(self, disk_grid):
        with pytest.raises(ValueError, match="Grid"):
            self.service.eigenpair_oracle(RadialDomain.disk(2.0), disk_grid, 0, 1)

    def test_second_eigenvalue(self):
        assert self.service.second_eigenvalue(RadialDomain.disk(1.0)) == pytest.approx(14.681970642, abs=1e-8)

    def test_second_eigenvalue_rejects_annulus(self):
        with pytest.raises(ValueError, match="disk"):
            self.service.second_eigenvalue(RadialDomain.annulus(0.5, 1.0))
