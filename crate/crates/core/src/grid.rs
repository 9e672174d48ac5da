//! One-dimensional pixelated substrate.

use crate::error::{Error, Result};

/// `N` pixels of width `ℓ`. Pixel `j` sits at integer coordinate
/// `origin_index + j`, i.e. physical position `(origin_index + j)·ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGrid {
    n_pixels: usize,
    pixel_width: f64,
    origin_index: i64,
}

impl PixelGrid {
    pub fn new(n_pixels: usize, pixel_width: f64, origin_index: i64) -> Result<Self> {
        if n_pixels == 0 {
            return Err(Error::param("n_pixels", "must be at least 1"));
        }
        if !(pixel_width > 0.0 && pixel_width.is_finite()) {
            return Err(Error::param(
                "pixel_width",
                format!("must be positive and finite, got {pixel_width}"),
            ));
        }
        Ok(Self {
            n_pixels,
            pixel_width,
            origin_index,
        })
    }

    /// Unit-width grid starting at coordinate 0.
    pub fn unit(n_pixels: usize) -> Result<Self> {
        Self::new(n_pixels, 1.0, 0)
    }

    /// Grid whose coordinates run from `-(N/2)` to `N - N/2 - 1`.
    pub fn centered(n_pixels: usize, pixel_width: f64) -> Result<Self> {
        Self::new(n_pixels, pixel_width, -((n_pixels / 2) as i64))
    }

    pub fn n_pixels(&self) -> usize {
        self.n_pixels
    }

    pub fn pixel_width(&self) -> f64 {
        self.pixel_width
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    /// Integer coordinate of pixel `j`, in pixel units.
    pub fn coordinate(&self, j: usize) -> f64 {
        (self.origin_index + j as i64) as f64
    }

    /// Physical position of pixel `j`, in length units.
    pub fn position(&self, j: usize) -> f64 {
        self.coordinate(j) * self.pixel_width
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_pixels).map(move |j| self.coordinate(j))
    }

    /// `L = N·ℓ`.
    pub fn total_length(&self) -> f64 {
        self.n_pixels as f64 * self.pixel_width
    }

    /// Index of the pixel with the given integer coordinate, if on the grid.
    pub fn index_of(&self, coordinate: i64) -> Option<usize> {
        let j = coordinate - self.origin_index;
        (0..self.n_pixels as i64).contains(&j).then_some(j as usize)
    }

    pub(crate) fn ensure_same(&self, other: &PixelGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.n_pixels,
                right: other.n_pixels,
            })
        }
    }
}
