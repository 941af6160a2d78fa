pub mod analysis;
pub mod detcheck;
pub mod dynamics;
pub mod finder;
pub mod polyalg;
pub mod sampling;
pub mod systems;
