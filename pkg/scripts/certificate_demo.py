#!/usr/bin/env python3
"""Loop robustness certificates for the linearized pole-balancing plant.

Illustrative only: the experiment harness never uses these weights or
controllers. The script linearizes the benchmark plant at upright,
closes the loop with a lead compensator, and prints the certificate for
the plain plant and for a shaped plant W2 * P * W1, including a case
where the candidate controller fails to stabilize the shaped loop.
"""
import numpy as np

from afcsim import lti, plant


def linearized_pendulum(params: plant.PendulumParams) -> lti.StateSpaceModel:
    """x1'' = a x1 + b u around the upright equilibrium."""
    total = params.cart_mass + params.pole_mass
    denom = params.half_length * (4.0 / 3.0 - params.pole_mass / total)
    a = params.gravity / denom
    b = plant.pendulum_g(params, [0.0, 0.0])
    return lti.StateSpaceModel([[0.0, 1.0], [a, 0.0]], [[0.0], [b]],
                               [[1.0, 0.0]], [[0.0]])


def lead(kc: float, zero: float, pole: float) -> lti.StateSpaceModel:
    """kc (s + zero) / (s + pole)"""
    return lti.StateSpaceModel([[-pole]], [[1.0]], [[kc * (zero - pole)]], [[kc]])


def report(label: str, cert: lti.RobustnessCertificate) -> None:
    if cert.loop_stable:
        print(f"  {label:<34} stable  norm={cert.norm_tzw:9.3f}  epsilon={cert.epsilon:.5f}")
    else:
        print(f"  {label:<34} UNSTABLE (norm unbounded, epsilon 0)")


def main() -> int:
    p_nom = linearized_pendulum(plant.PendulumParams())
    print("open-loop poles:", np.sort(np.linalg.eigvals(p_nom.A).real))

    gentle = lead(40.0, 5.0, 12.0)
    aggressive = lead(120.0, 3.0, 20.0)
    print("\nplain plant P:")
    report("lead 40(s+5)/(s+12)", lti.robustness_margin(p_nom, gentle, tol=1e-9))
    report("lead 120(s+3)/(s+20)", lti.robustness_margin(p_nom, aggressive, tol=1e-9))

    # low-frequency boost W1 = (s+2)/(s+0.1), unity W2
    w1 = lti.StateSpaceModel([[-0.1]], [[1.0]], [[1.9]], [[1.0]])
    shaped = lti.series(lti.identity(1), p_nom, w1)
    print("\nshaped plant W2*P*W1 with W1=(s+2)/(s+0.1), W2=1:")
    report("lead 40(s+5)/(s+12)", lti.robustness_margin(shaped, gentle, tol=1e-9))
    report("lead 120(s+3)/(s+20)", lti.robustness_margin(shaped, aggressive, tol=1e-9))
    print("\nlarger epsilon tolerates proportionally larger coprime-factor "
          "uncertainty around the shaped plant.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
