from displacement import uniform_displacement_field
from pipelines.core import StagePipeline


class SegmentedPipeline(StagePipeline):
    """Builds one displacement field per curve segment. Every segment
    runs between intersection points (or curve ends), so the resampled
    endpoints of stage t map exactly onto the matching intersection
    points of stage t+1.
    """

    name = 'model2'

    def build_fields(self, seg_t, seg_t1):
        fields = []
        for seg in seg_t.all_segments():
            other = seg_t1.segment(seg.parent_id, seg.segment_index)
            start = self.start_pair(seg.parent_id) if seg.closed else None
            fields.append(uniform_displacement_field(
                seg, other, self.n_points, self.keying, start))
        return fields
