pub mod dense;
pub mod rational;

pub use dense::Mat;
