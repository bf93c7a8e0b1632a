mod common;

use common::wall;
use crackforge::crack::{
    generate_damage_state, generate_instance, AnnotationGroup, CrackError, CrackParamRanges, DamageScene,
    MetaAnnotation, ParamRange, ParamSource, SceneComponent, SpallingConfig,
};
use crackforge::geometry::{
    retexture_component, select_component, BrickGrid, Material, Selector, SurfaceProjector, Texture, TriangleMesh, Vec3,
};

fn ranges(p: f64) -> CrackParamRanges<f64> {
    CrackParamRanges {
        length_fraction: ParamRange::new(0.6, 1.0),
        roughness_low: ParamRange::new(0.0, 0.08),
        roughness_high: ParamRange::new(0.0, 0.005),
        thickness: ParamRange::new(0.003, 0.012),
        depth: ParamRange::new(0.005, 0.02),
        appearance_probability: p,
        spalling_probability: 0.3,
    }
}

fn annotation(m: &TriangleMesh<f64>, comp: &SceneComponent<f64>, id: u32, a: Vec3<f64>, b: Vec3<f64>, params: ParamSource<f64>) -> MetaAnnotation<f64> {
    let proj = SurfaceProjector::new(m, &comp.component);
    MetaAnnotation {
        id,
        name: format!("a{id}"),
        component: 0,
        start: proj.project(a).1,
        end: proj.project(b).1,
        params,
    }
}

fn scene(m: &TriangleMesh<f64>) -> DamageScene<f64> {
    let comp = SceneComponent {
        component: select_component(m, "wall", &Selector::Faces((0..m.face_count() as u32).collect())).unwrap(),
        brick_grid: None,
    };
    let annotations = vec![
        annotation(m, &comp, 1, Vec3::new(0.3, 0.0, 0.4), Vec3::new(3.6, 0.0, 0.9), ParamSource::Own(ranges(1.0))),
        annotation(m, &comp, 2, Vec3::new(0.5, 0.0, 1.6), Vec3::new(3.4, 0.0, 1.4), ParamSource::Group("early".into())),
        annotation(m, &comp, 3, Vec3::new(0.6, 0.0, 2.6), Vec3::new(3.2, 0.0, 2.2), ParamSource::Group("late".into())),
    ];
    DamageScene {
        components: vec![comp],
        annotations,
        groups: vec![
            AnnotationGroup { id: "early".into(), ranges: ranges(1.0), enable_order: 0 },
            AnnotationGroup { id: "late".into(), ranges: ranges(1.0), enable_order: 1 },
        ],
        spalling: SpallingConfig::default(),
    }
}

fn tagged(m: &TriangleMesh<f64>, id: u32) -> Vec<[[u64; 3]; 3]> {
    let mut v: Vec<_> = (0..m.face_count())
        .filter(|&f| m.face_crack(f) == id)
        .map(|f| m.face_vertices(f).map(|p| p.to_f64().map(f64::to_bits)))
        .collect();
    v.sort();
    v
}

#[test]
fn higher_levels_add_cracks_without_changing_earlier_ones() {
    let m = wall(4.0, 3.0, 8, 6);
    let sc = scene(&m);
    for seed in [1u64, 2, 3] {
        let l0 = generate_damage_state(&m, &sc, 0, seed).unwrap();
        let l1 = generate_damage_state(&m, &sc, 1, seed).unwrap();
        let ids0: Vec<u32> = l0.instances.iter().map(|c| c.id).collect();
        let ids1: Vec<u32> = l1.instances.iter().map(|c| c.id).collect();
        assert_eq!(ids0, vec![1, 2]);
        assert_eq!(ids1, vec![1, 2, 3]);
        for c in &l0.instances {
            assert_eq!(Some(c), l1.instances.iter().find(|d| d.id == c.id));
            assert_eq!(tagged(&l0.mesh, c.id), tagged(&l1.mesh, c.id));
        }
        l1.mesh.validate().unwrap();
    }
}

#[test]
fn same_seed_same_state() {
    let m = wall(4.0, 3.0, 8, 6);
    let sc = scene(&m);
    let a = generate_damage_state(&m, &sc, 1, 42).unwrap();
    let b = generate_damage_state(&m, &sc, 1, 42).unwrap();
    assert_eq!(a.instances, b.instances);
    assert_eq!(a.mesh.positions(), b.mesh.positions());
    assert_eq!(a.mesh.faces(), b.mesh.faces());
    let c = generate_damage_state(&m, &sc, 1, 43).unwrap();
    assert_ne!(a.instances, c.instances);
}

#[test]
fn sampled_values_respect_ranges() {
    let m = wall(4.0, 3.0, 8, 6);
    let sc = scene(&m);
    let r = ranges(1.0);
    for seed in 0..200 {
        let inst = generate_instance(&m, &sc, &sc.annotations[1], seed).unwrap().unwrap();
        assert!(r.thickness.contains(inst.params.thickness));
        assert!(r.depth.contains(inst.params.depth));
        assert!(inst.widths.iter().all(|w| *w <= inst.params.thickness));
        assert!(inst.depths.iter().all(|d| *d <= inst.params.depth));
        assert!(inst.length() > 0.0);
    }
}

#[test]
fn validation_errors() {
    let m = wall(4.0, 3.0, 8, 6);
    let mut sc = scene(&m);
    sc.annotations[2].params = ParamSource::Group("G9".into());
    assert!(matches!(generate_damage_state(&m, &sc, 0, 1), Err(CrackError::UnknownGroup { .. })));

    let mut sc = scene(&m);
    sc.groups[1].enable_order = 0;
    assert!(matches!(generate_damage_state(&m, &sc, 0, 1), Err(CrackError::DuplicateEnableOrder(0))));

    let mut sc = scene(&m);
    sc.groups[0].ranges.thickness = ParamRange::new(0.005, 0.001);
    let err = generate_damage_state(&m, &sc, 0, 1).unwrap_err().to_string();
    assert!(err.contains("early") && err.contains("thickness"), "{err}");
}

#[test]
fn masonry_cracks_follow_mortar() {
    let mut m = wall(4.0, 3.0, 8, 6);
    let mut sc = scene(&m);
    retexture_component(&mut m, &mut sc.components[0].component, Texture::Solid([140, 70, 50]), Material::Masonry).unwrap();
    let res = generate_damage_state(&m, &sc, 1, 5);
    assert!(matches!(res, Err(CrackError::MissingBrickGrid { .. })));

    let grid = BrickGrid {
        origin: Vec3::new(0.0, 0.0, 0.0),
        u_axis: Vec3::new(1.0, 0.0, 0.0),
        v_axis: Vec3::new(0.0, 0.0, 1.0),
        brick_width: 0.24,
        brick_height: 0.065,
        mortar_width: 0.01,
        columns: 16,
        rows: 40,
    };
    sc.components[0].brick_grid = Some(grid);
    let st = generate_damage_state(&m, &sc, 1, 5).unwrap();
    assert!(!st.instances.is_empty());
    for c in &st.instances {
        assert!(c.masonry);
        for p in &c.points {
            assert!(grid.distance_to_mortar(*p) <= grid.mortar_width / 2.0 + 1e-9);
        }
    }
}

#[test]
fn zero_roughness_full_length_gives_straight_crack() {
    let m = wall(4.0, 3.0, 8, 6);
    let mut sc = scene(&m);
    let mut r = ranges(1.0);
    r.length_fraction = ParamRange::fixed(1.0);
    r.roughness_low = ParamRange::fixed(0.0);
    r.roughness_high = ParamRange::fixed(0.0);
    sc.annotations[0].params = ParamSource::Own(r);
    let inst = generate_instance(&m, &sc, &sc.annotations[0], 9).unwrap().unwrap();
    let (a, b) = (Vec3::new(0.3, 0.0, 0.4), Vec3::new(3.6, 0.0, 0.9));
    let dir = (b - a).normalize_or(Vec3::zero());
    for p in &inst.points {
        let q = a + dir * (*p - a).dot(dir);
        assert!(q.distance(*p) < 1e-12);
    }
    assert!((inst.length() - a.distance(b)).abs() < 1e-9);
}
