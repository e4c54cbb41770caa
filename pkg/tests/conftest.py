import pytest

import mtrumor as mt

# frozen oracle values, derived from the defining equations at 50 digits
# (mpmath: solve x*exp(2*(1-x)) = 1, then the closed forms)
X_INF_HP = 0.203187869979979953838479062062
V_INF_HP = 0.796812130020020046161520937938
SIGMA2_HP = 0.272735752851573738222607590956
VARRHO_HP = 0.179239390551036128244949798568
KAPPA_HP = 0.744999025084024734225082147704
ALPHA_HP = 0.517790699241991847420308586645
BETA_HP = 2.27222745810167891463213181866
INV_2SIG2_HP = 1.83327632982576491334092222973      # 1/(2 sigma^2)
INV_SIG2_HP = 3.66655265965152982668184445946      # 1/sigma^2
LOCAL_CLT_PREFACTOR_HP = 0.763904431123603783747421451313  # 1/sqrt(2 pi sigma^2)
RATIO_J1_HP = 1.14087548122583492679631802999      # 1/(alpha*kappa*beta)

# hand/high-precision values of the integer recursion
D_FIRST = [1, 12, 216, 5248, 160675, 5931540, 256182290, 12665445248]


@pytest.fixture(scope="session")
def consts():
    return mt.default_constants()


@pytest.fixture(scope="session")
def table520():
    return mt.get_table(520)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
