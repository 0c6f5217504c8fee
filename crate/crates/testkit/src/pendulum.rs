//! Planar pendulums swinging about parallel horizontal axes.
//!
//! Angles are measured from the downward vertical; the second joint angle is
//! relative to the first link. Each link is a rigid body with mass `mass`,
//! centre of mass at distance `com` from its joint, length `length` to the
//! next joint and moment of inertia `inertia` about its centre of mass.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarLink {
    pub mass: f64,
    pub length: f64,
    pub com: f64,
    pub inertia: f64,
}

impl PlanarLink {
    pub fn point_mass(mass: f64, length: f64) -> Self {
        Self {
            mass,
            length,
            com: length,
            inertia: 0.0,
        }
    }
}

/// Single link pendulum: `L = ½(m c² + I) q̇² + m g c cos q`.
#[derive(Debug, Clone, Copy)]
pub struct SinglePendulum {
    pub link: PlanarLink,
    pub gravity: f64,
}

impl SinglePendulum {
    pub fn inertia(&self) -> f64 {
        let l = self.link;
        l.mass * l.com * l.com + l.inertia
    }

    pub fn gravity_torque(&self, q: f64) -> f64 {
        self.link.mass * self.gravity * self.link.com * q.sin()
    }

    pub fn inverse_dynamics(&self, q: f64, _qd: f64, qdd: f64) -> f64 {
        self.inertia() * qdd + self.gravity_torque(q)
    }

    pub fn kinetic_energy(&self, qd: f64) -> f64 {
        0.5 * self.inertia() * qd * qd
    }

    pub fn potential_energy(&self, q: f64) -> f64 {
        -self.link.mass * self.gravity * self.link.com * q.cos()
    }
}

/// Two-link planar pendulum with the textbook Euler-Lagrange terms.
#[derive(Debug, Clone, Copy)]
pub struct DoublePendulum {
    pub links: [PlanarLink; 2],
    pub gravity: f64,
}

impl DoublePendulum {
    pub fn mass_matrix(&self, q: [f64; 2]) -> [[f64; 2]; 2] {
        let [a, b] = self.links;
        let c2 = q[1].cos();
        let m22 = b.mass * b.com * b.com + b.inertia;
        let m12 = m22 + b.mass * a.length * b.com * c2;
        let m11 = a.mass * a.com * a.com
            + a.inertia
            + b.mass * (a.length * a.length + b.com * b.com + 2.0 * a.length * b.com * c2)
            + b.inertia;
        [[m11, m12], [m12, m22]]
    }

    /// Coriolis and centrifugal generalized forces `C(q, q̇)`.
    pub fn coriolis(&self, q: [f64; 2], qd: [f64; 2]) -> [f64; 2] {
        let [a, b] = self.links;
        let h = b.mass * a.length * b.com * q[1].sin();
        [
            -h * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]),
            h * qd[0] * qd[0],
        ]
    }

    pub fn gravity_torque(&self, q: [f64; 2]) -> [f64; 2] {
        let [a, b] = self.links;
        let g = self.gravity;
        let s12 = (q[0] + q[1]).sin();
        [
            g * (a.mass * a.com + b.mass * a.length) * q[0].sin() + b.mass * g * b.com * s12,
            b.mass * g * b.com * s12,
        ]
    }

    pub fn inverse_dynamics(&self, q: [f64; 2], qd: [f64; 2], qdd: [f64; 2]) -> [f64; 2] {
        let m = self.mass_matrix(q);
        let c = self.coriolis(q, qd);
        let g = self.gravity_torque(q);
        [
            m[0][0] * qdd[0] + m[0][1] * qdd[1] + c[0] + g[0],
            m[1][0] * qdd[0] + m[1][1] * qdd[1] + c[1] + g[1],
        ]
    }

    pub fn kinetic_energy(&self, q: [f64; 2], qd: [f64; 2]) -> f64 {
        let m = self.mass_matrix(q);
        0.5 * (m[0][0] * qd[0] * qd[0] + 2.0 * m[0][1] * qd[0] * qd[1] + m[1][1] * qd[1] * qd[1])
    }

    pub fn potential_energy(&self, q: [f64; 2]) -> f64 {
        let [a, b] = self.links;
        let z1 = -a.com * q[0].cos();
        let z2 = -a.length * q[0].cos() - b.com * (q[0] + q[1]).cos();
        self.gravity * (a.mass * z1 + b.mass * z2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Euler-Lagrange by finite differences of the energies, as a check on
    // the hand-derived closed forms.
    #[test]
    fn closed_form_matches_numeric_lagrangian() {
        let p = DoublePendulum {
            links: [
                PlanarLink {
                    mass: 1.3,
                    length: 0.7,
                    com: 0.4,
                    inertia: 0.05,
                },
                PlanarLink {
                    mass: 0.8,
                    length: 0.5,
                    com: 0.3,
                    inertia: 0.02,
                },
            ],
            gravity: 9.81,
        };
        let lagrangian =
            |q: [f64; 2], qd: [f64; 2]| p.kinetic_energy(q, qd) - p.potential_energy(q);
        let q = [0.3, -1.1];
        let qd = [0.7, 1.9];
        let qdd = [-0.4, 2.2];
        let h = 1e-5;
        let dl_dqd = |q: [f64; 2], qd: [f64; 2], i: usize| {
            let mut a = qd;
            let mut b = qd;
            a[i] += h;
            b[i] -= h;
            (lagrangian(q, a) - lagrangian(q, b)) / (2.0 * h)
        };
        let tau = p.inverse_dynamics(q, qd, qdd);
        for i in 0..2 {
            // d/dt of ∂L/∂q̇ along the curve (q + q̇ t, q̇ + q̈ t)
            let fwd = dl_dqd(
                [q[0] + qd[0] * h, q[1] + qd[1] * h],
                [qd[0] + qdd[0] * h, qd[1] + qdd[1] * h],
                i,
            );
            let bwd = dl_dqd(
                [q[0] - qd[0] * h, q[1] - qd[1] * h],
                [qd[0] - qdd[0] * h, qd[1] - qdd[1] * h],
                i,
            );
            let ddt = (fwd - bwd) / (2.0 * h);
            let mut qa = q;
            let mut qb = q;
            qa[i] += h;
            qb[i] -= h;
            let dl_dq = (lagrangian(qa, qd) - lagrangian(qb, qd)) / (2.0 * h);
            assert!((ddt - dl_dq - tau[i]).abs() < 1e-4, "joint {i}");
        }
    }
}
