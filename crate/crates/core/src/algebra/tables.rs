//! Embedded composition tables for the built-in calculi.
//!
//! Rows are the relation between the first and second entity, columns the
//! relation between the second and third; each cell lists the possible
//! relations between the first and third entity, space separated.

pub(crate) struct BuiltinTable {
    pub name: &'static str,
    /// (symbol, inverse symbol, natural-language phrase)
    pub basics: &'static [(&'static str, &'static str, &'static str)],
    pub identity: &'static str,
    pub cells: &'static [&'static [&'static str]],
}

const ALL_IA: &str = "E P Pi D Di O Oi M Mi S Si F Fi";

/// Allen's interval algebra, with primitives ordered as E, P, Pi, D, Di, O,
/// Oi, M, Mi, S, Si, F, Fi.
pub(crate) const INTERVAL_ALGEBRA: BuiltinTable = BuiltinTable {
    name: "ia",
    basics: &[
        ("E", "E", "coincide with"),
        ("P", "Pi", "precede"),
        ("Pi", "P", "follow"),
        ("D", "Di", "happen during"),
        ("Di", "D", "contain"),
        ("O", "Oi", "overlap"),
        ("Oi", "O", "start during and end after"),
        ("M", "Mi", "meet"),
        ("Mi", "M", "start exactly at the end of"),
        ("S", "Si", "start with but end before"),
        ("Si", "S", "start with but end after"),
        ("F", "Fi", "end with but start after"),
        ("Fi", "F", "end with but start before"),
    ],
    identity: "E",
    cells: &[
        &[
            "E", "P", "Pi", "D", "Di", "O", "Oi", "M", "Mi", "S", "Si", "F", "Fi",
        ],
        &[
            "P",
            "P",
            ALL_IA,
            "P D O M S",
            "P",
            "P",
            "P D O M S",
            "P",
            "P D O M S",
            "P",
            "P",
            "P D O M S",
            "P",
        ],
        &[
            "Pi",
            ALL_IA,
            "Pi",
            "Pi D Oi Mi F",
            "Pi",
            "Pi D Oi Mi F",
            "Pi",
            "Pi D Oi Mi F",
            "Pi",
            "Pi D Oi Mi F",
            "Pi",
            "Pi",
            "Pi",
        ],
        &[
            "D",
            "P",
            "Pi",
            "D",
            ALL_IA,
            "P D O M S",
            "Pi D Oi Mi F",
            "P",
            "Pi",
            "D",
            "Pi D Oi Mi F",
            "D",
            "P D O M S",
        ],
        &[
            "Di",
            "P Di O M Fi",
            "Pi Di Oi Mi Si",
            "E D Di O Oi S Si F Fi",
            "Di",
            "Di O Fi",
            "Di Oi Si",
            "Di O Fi",
            "Di Oi Si",
            "Di O Fi",
            "Di",
            "Di Oi Si",
            "Di",
        ],
        &[
            "O",
            "P",
            "Pi Di Oi Mi Si",
            "D O S",
            "P Di O M Fi",
            "P O M",
            "E D Di O Oi S Si F Fi",
            "P",
            "Di Oi Si",
            "O",
            "Di O Fi",
            "D O S",
            "P O M",
        ],
        &[
            "Oi",
            "P Di O M Fi",
            "Pi",
            "D Oi F",
            "Pi Di Oi Mi Si",
            "E D Di O Oi S Si F Fi",
            "Pi Oi Mi",
            "Di O Fi",
            "Pi",
            "D Oi F",
            "Pi Oi Mi",
            "Oi",
            "Di Oi Si",
        ],
        &[
            "M",
            "P",
            "Pi Di Oi Mi Si",
            "D O S",
            "P",
            "P",
            "D O S",
            "P",
            "E F Fi",
            "M",
            "M",
            "D O S",
            "P",
        ],
        &[
            "Mi",
            "P Di O M Fi",
            "Pi",
            "D Oi F",
            "Pi",
            "D Oi F",
            "Pi",
            "E S Si",
            "Pi",
            "D Oi F",
            "Pi",
            "Mi",
            "Mi",
        ],
        &[
            "S",
            "P",
            "Pi",
            "D",
            "P Di O M Fi",
            "P O M",
            "D Oi F",
            "P",
            "Mi",
            "S",
            "E S Si",
            "D",
            "P O M",
        ],
        &[
            "Si",
            "P Di O M Fi",
            "Pi",
            "D Oi F",
            "Di",
            "Di O Fi",
            "Oi",
            "Di O Fi",
            "Mi",
            "E S Si",
            "Si",
            "Oi",
            "Di",
        ],
        &[
            "F",
            "P",
            "Pi",
            "D",
            "Pi Di Oi Mi Si",
            "D O S",
            "Pi Oi Mi",
            "M",
            "Pi",
            "D",
            "Pi Oi Mi",
            "F",
            "E F Fi",
        ],
        &[
            "Fi",
            "P",
            "Pi Di Oi Mi Si",
            "D O S",
            "Di",
            "O",
            "Di Oi Si",
            "M",
            "Di Oi Si",
            "O",
            "Di",
            "E F Fi",
            "Fi",
        ],
    ],
};

const ALL_RCC8: &str = "DC EC PO TPP NTPP TPPi NTPPi EQ";

/// RCC8, ordered DC, EC, PO, TPP, NTPP, TPPi, NTPPi, EQ.
pub(crate) const RCC8: BuiltinTable = BuiltinTable {
    name: "rcc8",
    basics: &[
        ("DC", "DC", "stay disconnected from"),
        ("EC", "EC", "only touch the boundary of"),
        ("PO", "PO", "partially overlap"),
        ("TPP", "TPPi", "lie inside, touching the boundary of"),
        ("NTPP", "NTPPi", "lie strictly inside"),
        ("TPPi", "TPP", "contain, touching the boundary of"),
        ("NTPPi", "NTPP", "strictly contain"),
        ("EQ", "EQ", "coincide with"),
    ],
    identity: "EQ",
    cells: &[
        // DC
        &[
            ALL_RCC8,
            "DC EC PO TPP NTPP",
            "DC EC PO TPP NTPP",
            "DC EC PO TPP NTPP",
            "DC EC PO TPP NTPP",
            "DC",
            "DC",
            "DC",
        ],
        // EC
        &[
            "DC EC PO TPPi NTPPi",
            "DC EC PO TPP TPPi EQ",
            "DC EC PO TPP NTPP",
            "EC PO TPP NTPP",
            "PO TPP NTPP",
            "DC EC",
            "DC",
            "EC",
        ],
        // PO
        &[
            "DC EC PO TPPi NTPPi",
            "DC EC PO TPPi NTPPi",
            ALL_RCC8,
            "PO TPP NTPP",
            "PO TPP NTPP",
            "DC EC PO TPPi NTPPi",
            "DC EC PO TPPi NTPPi",
            "PO",
        ],
        // TPP
        &[
            "DC",
            "DC EC",
            "DC EC PO TPP NTPP",
            "TPP NTPP",
            "NTPP",
            "DC EC PO TPP TPPi EQ",
            "DC EC PO TPPi NTPPi",
            "TPP",
        ],
        // NTPP
        &[
            "DC",
            "DC",
            "DC EC PO TPP NTPP",
            "NTPP",
            "NTPP",
            "DC EC PO TPP NTPP",
            ALL_RCC8,
            "NTPP",
        ],
        // TPPi
        &[
            "DC EC PO TPPi NTPPi",
            "EC PO TPPi NTPPi",
            "PO TPPi NTPPi",
            "PO TPP TPPi EQ",
            "PO TPP NTPP",
            "TPPi NTPPi",
            "NTPPi",
            "TPPi",
        ],
        // NTPPi
        &[
            "DC EC PO TPPi NTPPi",
            "PO TPPi NTPPi",
            "PO TPPi NTPPi",
            "PO TPPi NTPPi",
            "PO TPP NTPP TPPi NTPPi EQ",
            "NTPPi",
            "NTPPi",
            "NTPPi",
        ],
        // EQ
        &["DC", "EC", "PO", "TPP", "NTPP", "TPPi", "NTPPi", "EQ"],
    ],
};

/// The point algebra over a line: before, equal, after.
pub(crate) const POINT: BuiltinTable = BuiltinTable {
    name: "point",
    basics: &[
        ("<", ">", "occur before"),
        ("=", "=", "occur at the same time as"),
        (">", "<", "occur after"),
    ],
    identity: "=",
    cells: &[&["<", "<", "< = >"], &["<", "=", ">"], &["< = >", ">", ">"]],
};
