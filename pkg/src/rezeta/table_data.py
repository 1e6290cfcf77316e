"""Known locations of the first 50 negative local minima of Re zeta(1+it).

Regression targets for the scanner: each row is (t_min, re_zeta_min, length)
rounded to 4 decimal places, sorted by t.  The scanner's `table` replay mode
re-derives rows from scratch in a +-0.5 neighborhood of each t_min and must
match all three columns at this rounding.  FIRST_WINDOW holds the first
interval to 8 decimal places; SUM_OF_LENGTHS is the total negative measure
carried by the 50 windows.
"""

ROWS: list[tuple[float, float, float]] = [
    (682112.9169, -0.0028, 0.0529),
    (1267065.1710, -0.0040, 0.0655),
    (1466782.0667, -0.0013, 0.0391),
    (1858650.0915, -0.0282, 0.1686),
    (2023654.7671, -0.0221, 0.1389),
    (2064996.2141, -0.0117, 0.1076),
    (2195056.7909, -0.0755, 0.2718),
    (2202620.3296, -0.0111, 0.1159),
    (2530662.6360, -0.0072, 0.0865),
    (3259774.5293, -0.0471, 0.2098),
    (3548283.4160, -0.0189, 0.1459),
    (4052438.9330, -0.0023, 0.0474),
    (4197235.0783, -0.0331, 0.1977),
    (5410820.7150, -0.0008, 0.0307),
    (6027913.8513, -0.0181, 0.1325),
    (6164063.0008, -0.0263, 0.1603),
    (6238849.4877, -0.0071, 0.0827),
    (6265907.4688, -0.0030, 0.0522),
    (6421627.2235, -0.0241, 0.1651),
    (7338152.4379, -0.0043, 0.0656),
    (7469838.9709, -0.0009, 0.0305),
    (7766995.0303, -0.0742, 0.2840),
    (7774558.3985, -0.0672, 0.2705),
    (7985493.9836, -0.0324, 0.1728),
    (8299958.2327, -0.0022, 0.0432),
    (8350473.4853, -0.0019, 0.0451),
    (8366684.0439, -0.0197, 0.1322),
    (8452317.9526, -0.0090, 0.0900),
    (8967566.5926, -0.0148, 0.1336),
    (9960968.8748, -0.0184, 0.1373),
    (11231380.7309, -0.0099, 0.1042),
    (11236680.3350, -0.0262, 0.1595),
    (11781932.0257, -0.0170, 0.1288),
    (11884021.9776, -0.0035, 0.0564),
    (12045289.3337, -0.0644, 0.2498),
    (12276788.1573, -0.0182, 0.1476),
    (12546625.7916, -0.0455, 0.2031),
    (12781127.5748, -0.0102, 0.0964),
    (13598773.5889, -0.0543, 0.2317),
    (13786262.5457, -0.0826, 0.2635),
    (13922411.7750, -0.0222, 0.1418),
    (14190358.4974, -0.0632, 0.2214),
    (14391623.0217, -0.0016, 0.0437),
    (14788310.5330, -0.0149, 0.1132),
    (14856540.3430, -0.0220, 0.1442),
    (15173904.7533, -0.0041, 0.0800),
    (15321273.7219, -0.0131, 0.1181),
    (16083163.0244, -0.0098, 0.1038),
    (16503899.3235, -0.0060, 0.0680),
    (16656258.8346, -0.0155, 0.1329),
]

# first interval to 8 decimal places: (start, end), its length, and the
# minimum inside it
FIRST_WINDOW = (682112.89133824, 682112.94425049)
FIRST_WINDOW_LENGTH = 0.05291225
FIRST_WINDOW_MIN = -0.0027652
FIRST_WINDOW_ARGMIN = 682112.9169

# positivity holds below the first window
POSITIVE_BELOW = 682112.8913

SUM_OF_LENGTHS = 6.48390168
