//! Networks shared by the unit tests.

use crate::network::Network;

/// The travel-agency staffing problem: guides, cities, countries,
/// currencies and languages with five explicit constraints.
pub(crate) fn travel() -> Network {
    Network::builder()
        .variable("GUIDES", ["Alice", "Bob", "Chris"])
        .variable(
            "CITIES",
            ["Paris", "London", "Washington", "New-York", "Madrid"],
        )
        .variable("COUNTRIES", ["France", "GB", "USA", "Spain"])
        .variable("CURRENCIES", ["FrF", "£", "$", "Pes"])
        .variable("LANGUAGES", ["French", "English", "Spanish"])
        .constraint(
            "GUIDES",
            "CITIES",
            [
                ("Alice", "Paris"),
                ("Alice", "New-York"),
                ("Bob", "Paris"),
                ("Bob", "London"),
                ("Bob", "Washington"),
                ("Bob", "New-York"),
                ("Chris", "New-York"),
            ],
        )
        .constraint(
            "GUIDES",
            "LANGUAGES",
            [
                ("Alice", "French"),
                ("Bob", "French"),
                ("Bob", "English"),
                ("Chris", "Spanish"),
            ],
        )
        .constraint(
            "CITIES",
            "COUNTRIES",
            [
                ("Paris", "France"),
                ("London", "GB"),
                ("Washington", "USA"),
                ("New-York", "USA"),
                ("Madrid", "Spain"),
            ],
        )
        .constraint(
            "COUNTRIES",
            "CURRENCIES",
            [
                ("France", "FrF"),
                ("GB", "£"),
                ("USA", "$"),
                ("Spain", "Pes"),
            ],
        )
        .constraint(
            "COUNTRIES",
            "LANGUAGES",
            [
                ("France", "French"),
                ("GB", "English"),
                ("USA", "English"),
                ("Spain", "Spanish"),
            ],
        )
        .finish()
        .expect("travel network is well formed")
}

/// w = v^2 over signed integers: functional from v to w but not back.
pub(crate) fn squares() -> Network {
    Network::builder()
        .variable("v", ["-2", "-1", "0", "1", "2"])
        .variable("w", ["0", "1", "4"])
        .constraint(
            "v",
            "w",
            [("-2", "4"), ("-1", "1"), ("0", "0"), ("1", "1"), ("2", "4")],
        )
        .finish()
        .expect("squares network is well formed")
}

/// Three variables with roots {X1, X2} and pivot X2 -> X3; pivot consistent
/// but neither arc nor path consistent (b2 has no support in D_1).
pub(crate) fn pivot_consistent_triple() -> Network {
    Network::builder()
        .variable("X1", ["a1", "b1"])
        .variable("X2", ["a2", "b2", "c2"])
        .variable("X3", ["a3", "b3"])
        .constraint("X1", "X2", [("a1", "a2"), ("b1", "a2"), ("b1", "c2")])
        .constraint("X2", "X3", [("a2", "a3"), ("b2", "b3"), ("c2", "b3")])
        .constraint("X1", "X3", [("a1", "a3"), ("b1", "a3"), ("b1", "b3")])
        .finish()
        .expect("triple network is well formed")
}

/// Three variables with roots {X1, X2} and pivot candidate X2 -> X3; not
/// pivot consistent because (a1, b2) has no support in D_3.
pub(crate) fn unsupported_pair_triple() -> Network {
    Network::builder()
        .variable("X1", ["a1", "b1"])
        .variable("X2", ["a2", "b2"])
        .variable("X3", ["a3", "b3"])
        .constraint("X1", "X2", [("a1", "a2"), ("a1", "b2"), ("b1", "b2")])
        .constraint("X2", "X3", [("a2", "a3"), ("b2", "b3")])
        .constraint("X1", "X3", [("a1", "a3"), ("b1", "b3")])
        .finish()
        .expect("triple network is well formed")
}

/// x1 -> x2 -> x3 with single-direction functional relations.
pub(crate) fn chain3() -> Network {
    Network::builder()
        .variable("x1", ["a", "b"])
        .variable("x2", ["a", "b"])
        .variable("x3", ["a", "b"])
        .constraint("x1", "x2", [("a", "a"), ("b", "a")])
        .constraint("x2", "x3", [("a", "a"), ("b", "a")])
        .finish()
        .expect("chain network is well formed")
}

/// A directed 3-cycle in the functional subgraph: each relation is
/// functional in exactly one direction around the cycle.
pub(crate) fn cycle3() -> Network {
    Network::builder()
        .variable("x1", ["a", "b"])
        .variable("x2", ["a", "b"])
        .variable("x3", ["a", "b"])
        .constraint("x1", "x2", [("a", "a"), ("b", "a")])
        .constraint("x2", "x3", [("a", "a"), ("b", "a")])
        .constraint("x3", "x1", [("a", "a"), ("b", "a")])
        .finish()
        .expect("cycle network is well formed")
}
