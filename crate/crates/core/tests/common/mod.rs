//! Reference values computed with 50-digit arithmetic (mpmath), frozen here.

/// `(x, erfc(x))`.
pub const ERFC_ORACLE: [(f64, f64); 20] = [
    (0.0, 1.0),
    (0.05, 0.94362802220298337),
    (0.1, 0.8875370839817151),
    (0.25, 0.72367360983176307),
    (0.5, 0.47950012218695346),
    (0.75, 0.28884436634648487),
    (1.0, 0.15729920705028513),
    (1.25, 0.07709987174354177),
    (1.5, 0.033894853524689273),
    (2.0, 0.0046777349810472658),
    (2.5, 0.00040695201744495894),
    (3.0, 2.2090496998585441e-5),
    (3.5, 7.4309837234141275e-7),
    (4.0, 1.5417257900280019e-8),
    (5.0, 1.5374597944280349e-12),
    (6.0, 2.1519736712498913e-17),
    (8.0, 1.1224297172982927e-29),
    (-0.5, 1.5204998778130465),
    (-1.5, 1.9661051464753107),
    (-3.0, 1.9999779095030014),
];

/// `(a, x, Q(a, x))`, the regularized upper incomplete gamma function.
pub const IGAMC_ORACLE: [(f64, f64, f64); 30] = [
    (0.5, 0.1, 0.65472084601857702),
    (0.5, 2.0, 0.045500263896358414),
    (1.0, 0.5, 0.60653065971263342),
    (1.0, 3.0, 0.049787068367863943),
    (1.5, 1.0, 0.57240670447087983),
    (2.5, 2.5, 0.41588018699550792),
    (2.5, 7.0, 0.015609416100266915),
    (3.0, 1.0, 0.9196986029286058),
    (3.0, 10.0, 0.0027693957155115759),
    (4.5, 0.5, 0.9994375026978325),
    (4.5, 4.5, 0.43727418891386706),
    (4.5, 15.0, 0.00043872177097947949),
    (4.5, 30.0, 1.3406780483959613e-9),
    (5.0, 20.0, 1.6944743930067384e-5),
    (10.0, 5.0, 0.96817194269379519),
    (10.0, 12.0, 0.24239216167051235),
    (50.0, 45.0, 0.75319796559982973),
    (50.0, 70.0, 0.0051405024585058939),
    (128.0, 120.0, 0.75577464076903548),
    (512.0, 530.0, 0.21155165540565437),
    (512.0, 600.0, 0.00010746762608383036),
    (1024.0, 1000.0, 0.77201627430037852),
    (4096.0, 4200.0, 0.052977536481072871),
    (8192.0, 8100.0, 0.84533048685940482),
    (16384.0, 16500.0, 0.18227674031392938),
    (16384.0, 16000.0, 0.99874093356186363),
    (32768.0, 33000.0, 0.1001918547785774),
    (0.1, 0.9, 0.02839309539902908),
    (2.0, 0.01, 0.99995033208665973),
    (4.5, 100.0, 3.3129923939095531e-38),
];
