//! Haar-measure samplers on compact groups, their K subgroups and spherical
//! classes, driven by explicit seeded streams.

mod rng;
mod sampler;

pub use rng::{par_collect, RngStream, StreamId, BLOCK};
pub use sampler::{
    haar_group, haar_k, orbit_sample, radial_density_check, unit_quaternion, RadialCheck, RadialLaw,
};
