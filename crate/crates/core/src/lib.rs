//! Khovanov homology with basepoint actions, the pointed complex and its spectral
//! sequence, and the cube-of-resolutions model of knot Floer homology in low filtration.

pub mod battery;
pub mod diagram;
pub mod exactla;
pub mod exterior;
pub mod hfkcube;
pub mod khovanov;
pub mod pointed;
pub mod spectral;
pub mod unlinkmod;
