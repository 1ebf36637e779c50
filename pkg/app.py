import json

import streamlit as st

from subbary import __version__
from subbary.models.errors import SubbaryError
from subbary.models.geometry import SIDES, Direction, SliceSpec
from subbary.services.convex_body import ConvexBodyKernel
from subbary.services.eckardt import EckardtExample
from subbary.services.invariants import InvariantCalculator
from subbary.utils.config import Settings
from subbary.utils.database import ResultStore
from subbary.utils.exact import to_fraction
from subbary.utils.numeric import format_number
from subbary.utils.serialization import load_body, load_valuations

DEFAULT_DB_PATH = "./data/database/subbary.db"

# Page configuration
st.set_page_config(
    page_title="Sub-barycenter Explorer",
    page_icon="📐",
    layout="wide",
    initial_sidebar_state="expanded"
)

# Custom CSS
st.markdown("""
<style>
    .main-header {
        text-align: center;
        color: #2E86AB;
        font-size: 2.6rem;
        margin-bottom: 2rem;
    }
    .summary-box {
        background-color: #F8F9FA;
        padding: 1.5rem;
        border-radius: 10px;
        border-left: 5px solid #2E86AB;
    }
</style>
""", unsafe_allow_html=True)


class SubbaryDashboard:
    def __init__(self):
        self.settings = Settings.from_env()
        self.kernel = ConvexBodyKernel()
        self.calculator = InvariantCalculator(self.kernel)
        self.eckardt = EckardtExample(self.kernel)
        self.store = ResultStore(self.settings.db_path or DEFAULT_DB_PATH)

        if 'body' not in st.session_state:
            st.session_state.body = None
        if 'valuations' not in st.session_state:
            st.session_state.valuations = []

    def render_header(self):
        """Render the main header"""
        st.markdown('<h1 class="main-header">📐 Sub-barycenter Explorer</h1>', unsafe_allow_html=True)

        stats = self.store.get_statistics()
        col1, col2, col3, col4 = st.columns(4)
        with col1:
            st.metric("Version", __version__)
        with col2:
            st.metric("Stored runs", stats.get('total_runs', 0))
        with col3:
            st.metric("Checks recorded", stats.get('total_checks', 0))
        with col4:
            st.metric("Runs with violations", stats.get('failing_runs', 0))

    def render_sidebar(self) -> dict:
        """Render the sidebar with controls"""
        with st.sidebar:
            st.header("🎯 Controls")
            n = st.number_input("Dimension n (0 = from body)", min_value=0, max_value=8, value=0)
            tau_points = st.slider("τ grid points", min_value=2, max_value=101, value=11)
            samples = st.slider("Curve samples", min_value=2, max_value=1001, value=101)

            st.subheader("🔧 Settings")
            st.caption(f"Seed: {self.settings.seed}")
            st.caption(f"Tolerance: {self.settings.tolerance}")
            st.caption(f"Result store: {self.store.db_path}")

        return {'n': int(n) or None, 'tau_points': tau_points, 'samples': samples}

    def _read_upload(self, uploaded_file):
        try:
            return json.loads(uploaded_file.getvalue().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            st.error(f"❌ {uploaded_file.name} is not valid JSON: {str(e)}")
            return None

    def render_slice_section(self):
        """Upload a body and inspect one half-space slice"""
        st.header("✂️ Slice explorer")

        uploaded_file = st.file_uploader("Body JSON ({dim, vertices})", type=['json'], key="body_upload")
        if uploaded_file is not None:
            data = self._read_upload(uploaded_file)
            if data is not None:
                try:
                    st.session_state.body = load_body(data, self.kernel)
                    st.success(f"✅ Loaded {uploaded_file.name}")
                except SubbaryError as e:
                    st.error(f"❌ {str(e)}")

        if st.session_state.body is None:
            if st.button("Load the Eckardt quadrilateral"):
                st.session_state.body = self.eckardt.body
            else:
                st.info("📝 Upload a body to begin.")
                return

        body = st.session_state.body
        col1, col2, col3 = st.columns(3)
        with col1:
            direction_text = st.text_input("Direction (axis or vector)", value="1")
        with col2:
            t_text = st.text_input("Threshold t", value="0")
        with col3:
            side = st.selectbox("Side", SIDES)

        try:
            direction = Direction.parse(direction_text, body.dim)
            spec = SliceSpec(direction=direction, t=to_fraction(t_text, "t"), side=side)
            report = self.kernel.slice_report(body, spec)
        except SubbaryError as e:
            st.warning(f"⚠️ {str(e)}")
            return

        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("Volume", report['volume'])
        with col2:
            st.metric("Slice volume", report['slice']['volume'])
        with col3:
            st.metric("τ", report['tau'])
        st.json(report)

    def render_invariants_section(self, controls: dict):
        """Stability reports over uploaded valuations"""
        st.header("📊 Invariants")

        uploaded_file = st.file_uploader("Valuations JSON", type=['json'], key="valuation_upload")
        if uploaded_file is not None:
            data = self._read_upload(uploaded_file)
            if data is not None:
                try:
                    st.session_state.valuations = load_valuations(data, self.kernel)
                except SubbaryError as e:
                    st.error(f"❌ {str(e)}")

        candidates = st.session_state.valuations or [self.eckardt.eck_valuation()]
        if not st.session_state.valuations:
            st.info("📝 No valuations uploaded; showing the Eckardt valuation.")

        n = controls['n'] or candidates[0].n
        rows = []
        try:
            with st.spinner("🔄 Computing reports..."):
                for i in range(controls['tau_points']):
                    tau = i / (controls['tau_points'] - 1)
                    report = self.calculator.stability_report(candidates, tau, n)
                    rows.append(report.to_dict())
        except SubbaryError as e:
            st.error(f"❌ Error computing invariants: {str(e)}")
            return

        skipped = sorted({name for row in rows for name in row['skipped']})
        if skipped:
            st.warning(f"⚠️ Skipped candidates with S = 0: {', '.join(skipped)}")
        st.dataframe(rows, use_container_width=True)

    def render_eckardt_section(self, controls: dict):
        """Golden values and the ratio curve of the cubic surface example"""
        st.header("🎯 Eckardt example")

        with st.spinner("🔄 Checking golden values..."):
            summary = self.eckardt.eck_summary(grid=200)

        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("α = A/S₀", summary['alpha'])
        with col2:
            st.metric("A/S₁", summary['ratio_at_1'])
        with col3:
            st.metric("Minimum margin", summary['min_margin'])

        tab1, tab2 = st.tabs(["📈 Ratio curve", "📋 Summary"])
        with tab1:
            rows = self.eckardt.eck_curve_rows(controls['samples'])
            st.line_chart(
                {key: [float(row[key]) for row in rows] for key in ("ratio", "threshold")},
            )
            st.dataframe(rows, use_container_width=True)
        with tab2:
            st.json(summary)

    def render_history_section(self):
        """Verification runs from the result store"""
        st.header("📋 Verification history")

        runs = self.store.get_recent_runs(limit=50)
        if not runs:
            st.info("📝 No stored runs yet. Use `subbary verify --db PATH` to record one.")
            return

        st.dataframe(runs, use_container_width=True)
        run_id = st.selectbox("Inspect run", [run['id'] for run in runs])
        run = self.store.get_suite_run(run_id)
        if run is None:
            st.error("❌ Run not found")
            return

        st.markdown(f"**Digest:** `{run['digest']}`")
        st.dataframe(
            [{'check': name, 'min_slack': format_number(slack)} for name, slack in run['min_slack'].items()],
            use_container_width=True,
        )
        violations = self.store.get_violations(run_id)
        if violations:
            st.error(f"❌ {len(violations)} violation(s)")
            st.dataframe([v._asdict() for v in violations], use_container_width=True)
        else:
            st.success("✅ No violations")

    def run(self):
        """Main application runner"""
        self.render_header()
        controls = self.render_sidebar()

        tab1, tab2, tab3, tab4 = st.tabs(
            ["✂️ Slice explorer", "📊 Invariants", "🎯 Eckardt example", "📋 Verification history"]
        )

        with tab1:
            self.render_slice_section()

        with tab2:
            self.render_invariants_section(controls)

        with tab3:
            self.render_eckardt_section(controls)

        with tab4:
            self.render_history_section()


# Run the application
if __name__ == "__main__":
    app = SubbaryDashboard()
    app.run()
