//! Debug dumps of complex matrices: CSV rows `row,col,re,im` and a
//! little-endian binary layout `rows:u64, cols:u64, (re:f64, im:f64)*`, both
//! in column-major order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::Complex64;

pub fn write_matrix_csv<W: Write>(out: W, a: &CMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im"])?;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let z = a[(r, c)];
            w.write_record(&[
                r.to_string(),
                c.to_string(),
                format!("{:e}", z.re),
                format!("{:e}", z.im),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_binary<W: Write>(mut out: W, a: &CMatrix) -> Result<()> {
    out.write_all(&(a.nrows() as u64).to_le_bytes())?;
    out.write_all(&(a.ncols() as u64).to_le_bytes())?;
    for z in a.iter() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_binary<R: Read>(mut input: R) -> Result<CMatrix> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let rows = u64::from_le_bytes(next(&mut input)?) as usize;
    let cols = u64::from_le_bytes(next(&mut input)?) as usize;
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Dimension(format!("{rows} × {cols} overflows")))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let re = f64::from_le_bytes(next(&mut input)?);
        let im = f64::from_le_bytes(next(&mut input)?);
        data.push(Complex64::new(re, im));
    }
    Ok(CMatrix::from_vec(rows, cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    proptest::proptest! {
        #[test]
        fn binary_roundtrip(rows in 0usize..5, cols in 0usize..5, seed in 0u64..1000) {
            let a = CMatrix::from_fn(rows, cols, |r, c| {
                Complex64::new((seed + r as u64) as f64 * 0.37, -(c as f64) * 1.5e-9)
            });
            let mut buf = Vec::new();
            write_matrix_binary(&mut buf, &a).unwrap();
            proptest::prop_assert_eq!(buf.len(), 16 + 16 * rows * cols);
            proptest::prop_assert_eq!(read_matrix_binary(buf.as_slice()).unwrap(), a);
        }
    }

    #[test]
    fn csv_is_column_major() {
        let a = CMatrix::from_fn(2, 2, |r, c| Complex64::new((r + 2 * c) as f64, 0.0));
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,col,re,im");
        assert!(lines[2].starts_with("1,0,1e0"));
        assert!(lines[3].starts_with("0,1,2e0"));
    }
}
