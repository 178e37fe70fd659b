from displacement import uniform_displacement_field
from pipelines.core import StagePipeline


class WholeCurvePipeline(StagePipeline):
    """Builds one displacement field per parent curve and ignores the
    segmentation when resampling. Intersection points of stage t are
    therefore not guaranteed to land on the intersection points of
    stage t+1, which may invert elements around the junctions. The
    mesh itself is still built from the segmented geometry.
    """

    name = 'model1'

    def build_fields(self, seg_t, seg_t1):
        fields = []
        for cid in seg_t.curve_ids:
            curve_t, curve_t1 = seg_t.curve(cid), seg_t1.curve(cid)
            start = self.start_pair(cid) if curve_t.closed else None
            fields.append(uniform_displacement_field(
                curve_t, curve_t1, self.n_points, self.keying, start))
        return fields
