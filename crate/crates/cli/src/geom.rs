// SPDX-License-Identifier: Apache-2.0

//! Body expressions for one-shot geometry queries.
//!
//! ```text
//! body  := term ('+' term)*
//! term  := [number '*'] factor
//! factor:= 'rot90(' body ')' | shape
//! shape := 'ball:' r [',' x ',' y] | 'point:' x ',' y | 'seg:' len
//!        | 'square:' side | 'rect:' w ',' h | 'poly:' x ',' y (';' x ',' y)*
//! ```
//!
//! `+` is the Minkowski sum, `k*` a dilation, `rot90` the quarter turn.

use setflow_core::convex::{
    area, hausdorff_distance, hukuhara_difference, linear_image, make_ball, make_point, make_polygon,
    make_rectangle, make_segment, make_square, minkowski_add, mixed_area, perimeter, scale, Hukuhara,
    LinearOperator2D, SupportFunction2D,
};

use crate::error::CliError;
use crate::format::g12;

pub const DEFAULT_GEOM_GRID: usize = 4096;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    m: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Body(format!("invalid body `{}` at {}: {msg}", self.src, self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CliError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn number(&mut self) -> Result<f64, CliError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() {
            let c = bytes[i];
            let exp_sign = (c == b'-' || c == b'+') && i > start && matches!(bytes[i - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                i += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..i];
        let v: f64 = text.parse().map_err(|_| self.err(format!("bad number `{text}`")))?;
        if !v.is_finite() {
            return Err(self.err("number must be finite"));
        }
        self.pos = i;
        Ok(v)
    }

    fn looks_numeric(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.' || c == '-')
    }

    fn body(&mut self) -> Result<SupportFunction2D, CliError> {
        let mut acc = self.term()?;
        while self.eat('+') {
            acc = minkowski_add(&acc, &self.term()?)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SupportFunction2D, CliError> {
        if self.looks_numeric() {
            let k = self.number()?;
            self.expect('*')?;
            if k < 0.0 {
                return Err(self.err("dilation factor must be nonnegative"));
            }
            return Ok(scale(&self.factor()?, k)?);
        }
        self.factor()
    }

    fn numbers(&mut self, sep: char) -> Result<Vec<f64>, CliError> {
        let mut out = vec![self.number()?];
        while self.eat(sep) {
            out.push(self.number()?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<SupportFunction2D, CliError> {
        let name = self.ident();
        if name == "rot90" {
            self.expect('(')?;
            let inner = self.body()?;
            self.expect(')')?;
            return Ok(linear_image(&inner, &LinearOperator2D::quarter_turn())?);
        }
        self.expect(':')?;
        let m = self.m;
        let body = match name.as_str() {
            "ball" => match self.numbers(',')?.as_slice() {
                [r] => make_ball(*r, [0.0, 0.0], m)?,
                [r, x, y] => make_ball(*r, [*x, *y], m)?,
                _ => return Err(self.err("ball takes r or r,x,y")),
            },
            "point" => match self.numbers(',')?.as_slice() {
                [x, y] => make_point([*x, *y], m)?,
                _ => return Err(self.err("point takes x,y")),
            },
            "seg" => make_segment(self.number()?, m)?,
            "square" => make_square(self.number()?, m)?,
            "rect" => match self.numbers(',')?.as_slice() {
                [w, h] => make_rectangle(*w, *h, m)?,
                _ => return Err(self.err("rect takes w,h")),
            },
            "poly" => {
                let mut pts = Vec::new();
                loop {
                    match self.numbers(',')?.as_slice() {
                        [x, y] => pts.push([*x, *y]),
                        _ => return Err(self.err("poly vertices are x,y pairs separated by `;`")),
                    }
                    if !self.eat(';') {
                        break;
                    }
                }
                make_polygon(&pts, m)?
            }
            "" => return Err(self.err("expected a shape")),
            other => return Err(self.err(format!("unknown shape `{other}`"))),
        };
        Ok(body)
    }
}

pub fn parse_body(src: &str, m: usize) -> Result<SupportFunction2D, CliError> {
    let mut p = Parser { src, pos: 0, m };
    let body = p.body().map_err(|e| match e {
        CliError::Geometry(g) => CliError::Body(format!("invalid body `{src}`: {g}")),
        e => e,
    })?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(body)
}

pub const OPS: &[(&str, usize, &str)] = &[
    ("area", 1, "area of one body"),
    ("perimeter", 1, "perimeter of one body"),
    ("mixed", 2, "mixed area V[u, v]"),
    ("hausdorff", 2, "Hausdorff distance"),
    ("hukuhara", 2, "Hukuhara difference u - v, or `no difference`"),
];

/// Evaluates `op` on the body expressions and returns the printed line.
pub fn run(op: &str, bodies: &[String], m: usize) -> Result<String, CliError> {
    let arity = OPS
        .iter()
        .find(|(name, _, _)| *name == op)
        .map(|(_, n, _)| *n)
        .ok_or_else(|| CliError::Body(format!("unknown op `{op}`")))?;
    if bodies.len() != arity {
        return Err(CliError::Body(format!("`{op}` takes {arity} bodies, got {}", bodies.len())));
    }
    let parsed = bodies.iter().map(|b| parse_body(b, m)).collect::<Result<Vec<_>, _>>()?;
    let line = match op {
        "area" => g12(area(&parsed[0])),
        "perimeter" => g12(perimeter(&parsed[0])),
        "mixed" => g12(mixed_area(&parsed[0], &parsed[1])?),
        "hausdorff" => g12(hausdorff_distance(&parsed[0], &parsed[1])?),
        "hukuhara" => match hukuhara_difference(&parsed[0], &parsed[1])? {
            Hukuhara::Difference(w) => format!("area {} perimeter {}", g12(area(&w)), g12(perimeter(&w))),
            Hukuhara::NoDifference { .. } => "no difference".into(),
        },
        _ => unreachable!("op table and match agree"),
    };
    Ok(line)
}
