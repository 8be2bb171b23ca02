use crate::{Complex, Real};

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    /// Reflection across the boundary `y = 0`.
    pub fn image(self) -> Self {
        Point::new(self.x, -self.y)
    }

    /// Reflection across the axis `x = 0`.
    pub fn mirror_x(self) -> Self {
        Point::new(-self.x, self.y)
    }

    pub fn dist(self, other: Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    /// `x + i y`.
    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> std::ops::Sub for Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Self) -> Self {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> std::ops::Add for Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Self) -> Self {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}
