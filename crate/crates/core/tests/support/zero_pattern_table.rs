// Population criterion xi_K for the default design, for every non-empty
// subset K of 1..=7 (bit j-1 of the mask marks variable j). Values were
// computed independently with numpy (explicit submatrix inverse and
// Frobenius norm); supersets of {1, 4, 7} are zero.
pub const ZERO_PATTERN_TABLE: [(u32, f64); 127] = [
    (1, 12.423964018873855),
    (2, 14.658836250432023),
    (3, 11.787450115142798),
    (4, 15.426589384377213),
    (5, 10.017132388272588),
    (6, 13.277064482941238),
    (7, 10.017132388272588),
    (8, 14.25354602261311),
    (9, 6.159560499489797),
    (10, 10.671348815724983),
    (11, 6.159560499489797),
    (12, 13.250543547223828),
    (13, 6.159560499489797),
    (14, 10.671348815724983),
    (15, 6.159560499489797),
    (16, 17.319642504379015),
    (17, 8.300567052116271),
    (18, 11.804837704932497),
    (19, 7.963459878708244),
    (20, 13.732887078105609),
    (21, 7.138309936532596),
    (22, 11.26467792482324),
    (23, 7.138309936532596),
    (24, 14.029570821014982),
    (25, 5.6218741314618565),
    (26, 10.370292606768626),
    (27, 5.6218741314618565),
    (28, 13.009311569026242),
    (29, 5.6218741314618565),
    (30, 10.370292606768626),
    (31, 5.6218741314618565),
    (32, 18.430534133125715),
    (33, 9.094315740246333),
    (34, 12.190688629989546),
    (35, 8.524986174379194),
    (36, 13.670605079505293),
    (37, 7.0177435468814275),
    (38, 11.18866500033833),
    (39, 7.0177435468814275),
    (40, 13.515209531186521),
    (41, 4.175823272122517),
    (42, 9.663074045043844),
    (43, 4.175823272122517),
    (44, 12.452879937990248),
    (45, 4.175823272122517),
    (46, 9.663074045043844),
    (47, 4.175823272122517),
    (48, 16.90568093066624),
    (49, 7.398070331963478),
    (50, 11.18866500033833),
    (51, 7.017743546881428),
    (52, 13.206976139525656),
    (53, 6.065269985746719),
    (54, 10.617203021511832),
    (55, 6.065269985746719),
    (56, 13.515209531186521),
    (57, 4.175823272122517),
    (58, 9.663074045043844),
    (59, 4.175823272122517),
    (60, 12.452879937990248),
    (61, 4.175823272122517),
    (62, 9.663074045043844),
    (63, 4.175823272122517),
    (64, 18.513641719590325),
    (65, 8.778183688881182),
    (66, 11.883037439278402),
    (67, 8.078928071427063),
    (68, 13.226135618035912),
    (69, 6.106876831628275),
    (70, 10.641026484163932),
    (71, 6.106876831628275),
    (72, 12.85392502980607),
    (73, 0.0),
    (74, 8.714212528966687),
    (75, 0.0),
    (76, 11.731867658220493),
    (77, 0.0),
    (78, 8.714212528966687),
    (79, 0.0),
    (80, 16.381835908392326),
    (81, 6.106876831628275),
    (82, 10.380208306666873),
    (83, 5.640144013214195),
    (84, 12.52943409536121),
    (85, 4.398863489584555),
    (86, 9.761531642114367),
    (87, 4.398863489584555),
    (88, 12.85392502980607),
    (89, 0.0),
    (90, 8.714212528966687),
    (91, 0.0),
    (92, 11.731867658220493),
    (93, 0.0),
    (94, 8.714212528966687),
    (95, 0.0),
    (96, 17.951241974646546),
    (97, 8.078928071427063),
    (98, 11.45318249541831),
    (99, 7.4322196733786345),
    (100, 13.017217184936108),
    (101, 5.6401440132141945),
    (102, 10.380208306666871),
    (103, 5.6401440132141945),
    (104, 12.85392502980607),
    (105, 0.0),
    (106, 8.714212528966687),
    (107, 0.0),
    (108, 11.731867658220493),
    (109, 0.0),
    (110, 8.714212528966687),
    (111, 0.0),
    (112, 16.381835908392326),
    (113, 6.106876831628275),
    (114, 10.380208306666873),
    (115, 5.640144013214195),
    (116, 12.52943409536121),
    (117, 4.398863489584555),
    (118, 9.761531642114367),
    (119, 4.398863489584555),
    (120, 12.85392502980607),
    (121, 0.0),
    (122, 8.714212528966687),
    (123, 0.0),
    (124, 11.731867658220493),
    (125, 0.0),
    (126, 8.714212528966687),
    (127, 0.0),
];
