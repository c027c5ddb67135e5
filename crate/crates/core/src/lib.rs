pub mod bkmodel;
pub mod linalg;
pub mod numerix;
pub mod prolong;
pub mod reduce;
pub mod symkernel;
