//! The fixed operator table.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixity {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u32,
    pub fixity: Fixity,
}

impl OpDef {
    /// Maximum priorities of the (left, right) operands of an infix operator.
    pub fn infix_arg_limits(self) -> (u32, u32) {
        let p = self.priority;
        match self.fixity {
            Fixity::Xfx => (p - 1, p - 1),
            Fixity::Xfy => (p - 1, p),
            Fixity::Yfx => (p, p - 1),
            Fixity::Fy | Fixity::Fx => unreachable!("not an infix operator"),
        }
    }

    /// Maximum priority of the operand of a prefix operator.
    pub fn prefix_arg_limit(self) -> u32 {
        match self.fixity {
            Fixity::Fy => self.priority,
            Fixity::Fx => self.priority - 1,
            _ => unreachable!("not a prefix operator"),
        }
    }
}

const fn op(priority: u32, fixity: Fixity) -> OpDef {
    OpDef { priority, fixity }
}

pub fn infix(name: &str) -> Option<OpDef> {
    use Fixity::*;
    Some(match name {
        ":-" => op(1200, Xfx),
        ";" => op(1100, Xfy),
        "->" => op(1050, Xfy),
        "," => op(1000, Xfy),
        "=" | "\\=" | "==" | "\\==" | "is" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" => {
            op(700, Xfx)
        }
        "+" | "-" => op(500, Yfx),
        "*" | "/" | "//" | "mod" => op(400, Yfx),
        _ => return None,
    })
}

pub fn prefix(name: &str) -> Option<OpDef> {
    use Fixity::*;
    Some(match name {
        ":-" | "?-" => op(1200, Fx),
        "\\+" => op(900, Fy),
        "-" => op(200, Fy),
        _ => return None,
    })
}

pub fn is_op(name: &str) -> bool {
    infix(name).is_some() || prefix(name).is_some()
}

/// Alphanumeric names that act as operators.
pub fn is_alpha_op(name: &str) -> bool {
    matches!(name, "is" | "mod")
}
