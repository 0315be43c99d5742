//! Every example runs to completion.

macro_rules! example {
    ($test:ident, $file:literal) => {
        mod $test {
            include!(concat!("../examples/", $file));
            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(airy_selftest, "airy_selftest.rs");
example!(eigenvalues, "eigenvalues.rs");
example!(norming_constants, "norming_constants.rs");
example!(asymptotics, "asymptotics.rs");
example!(oracle_crosscheck, "oracle_crosscheck.rs");
example!(gradients, "gradients.rs");
example!(verify_campaign, "verify_campaign.rs");
