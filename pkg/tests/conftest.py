import numpy as np
import pytest

from hannay_kit import OscillatorSpec, PeriodicFunction, build_frame

TAU_2PI = 2.0 * np.pi
TAU_PI = np.pi

ALPHA = np.sqrt(2.0)
SKEWED_PAIR_INIT = ((ALPHA, 0.0), (0.0, 1.0 / ALPHA))


def sho_spec(tau=TAU_2PI):
    return OscillatorSpec.build(tau=tau)


def mathieu_spec():
    # Stable (elliptic) point of the modulated-frequency oscillator; the
    # modulation is centered off the parametric resonance on purpose.
    return OscillatorSpec.build(
        tau=TAU_PI,
        w_sq=PeriodicFunction(TAU_PI, 1.3, ((1, 0.2, 0.0),)))


def resonance_centered_spec(eps=0.2):
    # w^2 = 1 + eps cos 2t pumps at twice the natural frequency: the center
    # of the principal parametric-resonance tongue, unstable for any eps > 0.
    return OscillatorSpec.build(
        tau=TAU_PI,
        w_sq=PeriodicFunction(TAU_PI, 1.0, ((1, eps, 0.0),)))


def full_spec():
    tau = TAU_2PI
    return OscillatorSpec.build(
        tau=tau,
        M=PeriodicFunction(tau, 1.0, ((1, 0.15, 0.0),)),
        w_sq=PeriodicFunction(tau, 1.21, ((1, 0.1, 0.0),)),
        a=PeriodicFunction(tau, 0.0, ((1, 0.08, 0.03),)),
        b=PeriodicFunction(tau, 0.0, ((1, 0.0, 0.1),)),
        F=PeriodicFunction(tau, 0.0, ((2, 0.2, 0.0), (1, 0.0, 0.1))),
        f=PeriodicFunction(tau, 0.05, ((1, 0.1, 0.0),)),
    )


def commensurate_spec():
    # Force period (3/2) tau; with w = 0.7 the full-period monodromy has no
    # unit eigenvalue, so the periodic particular solution exists.
    tau = TAU_2PI
    return OscillatorSpec.build(
        tau=tau, w_sq=0.49,
        F=PeriodicFunction(1.5 * tau, 0.0, ((1, 0.0455, 0.0),)))


def resonant_forcing_spec():
    tau = TAU_2PI
    return OscillatorSpec.build(
        tau=tau, F=PeriodicFunction(tau, 0.0, ((1, 0.3, 0.0),)))


@pytest.fixture(scope="session")
def sho_frame():
    return build_frame(sho_spec())


@pytest.fixture(scope="session")
def mathieu_frame():
    return build_frame(mathieu_spec())


@pytest.fixture(scope="session")
def full_frame():
    return build_frame(full_spec())


@pytest.fixture(scope="session")
def commensurate_frame():
    return build_frame(commensurate_spec())


@pytest.fixture(scope="session")
def skewed_frame():
    return build_frame(sho_spec(tau=TAU_PI), pair_init=SKEWED_PAIR_INIT)


@pytest.fixture(scope="session")
def certified_frames(sho_frame, mathieu_frame, full_frame, commensurate_frame,
                     skewed_frame):
    return {
        "sho": sho_frame,
        "mathieu": mathieu_frame,
        "full": full_frame,
        "commensurate": commensurate_frame,
        "skewed": skewed_frame,
    }
