import streamlit as st

from src.data.data_manager import CorpusManager
from src.exploration.cloud_explorer import CloudExplorer
from src.visualization.report_visualizer import ReportVisualizer


def render_cloud_upload_ui():
    """Renderiza la interfaz de usuario para cargar nubes"""

    st.header("📤 Carga de Nubes")

    manager = CorpusManager(st.session_state)

    #Widget para subir archivos
    uploaded_file = st.file_uploader(
        "Selecciona una nube para cargar",
        type=["epc", "csv"],
        help="Formatos soportados: EPC (binario) y CSV (x,y,z,r,g,b,label[,class_name])"
    )

    if uploaded_file is not None:
        load_options = {}

        #Para CSV
        if uploaded_file.name.lower().endswith('csv'):
            st.subheader("Opciones de carga")
            delimiter = st.selectbox(
                "Delimitador",
                options=[",", ";", "\\t", "|"],
                index=0,
                help="Selecciona el delimitador usado en el archivo CSV"
            )
            encoding = st.selectbox(
                "Codificación",
                options=["utf-8", "latin-1"],
                index=0
            )
            load_options = {"delimiter": delimiter.replace("\\t", "\t"), "encoding": encoding}

        if st.button("Cargar nube"):
            uploaded_file.seek(0)
            success, message = manager.load_file(uploaded_file, **load_options)
            if success:
                st.success(message)
            else:
                st.error(message)

    #Mostramos las nubes cargadas
    loaded_files = manager.get_loaded_files()
    if not loaded_files:
        return

    st.subheader("Nubes cargadas")
    current = manager.get_current_file()
    selected_file = st.selectbox(
        "Selecciona una nube",
        options=loaded_files,
        index=loaded_files.index(current) if current in loaded_files else 0
    )
    if st.button("Mostrar nube seleccionada"):
        success, message = manager.select_file(selected_file)
        if success:
            st.success(message)
        else:
            st.error(message)

    cloud = manager.get_current_cloud()
    if cloud is None:
        return

    explorer = CloudExplorer(cloud)
    visualizer = ReportVisualizer(st.session_state)

    histogram = explorer.class_histogram()
    with st.expander("🔍 Filtrar por clases", expanded=False):
        options = histogram["label"].tolist()
        selected = st.multiselect(
            "Clases a mostrar",
            options=options,
            format_func=lambda l: f"{l}: {cloud.class_names.get(int(l), 'unlabeled')}"
        )
        explorer.filter_by_classes(selected)

    st.subheader(f"Vista previa: {manager.get_current_file()}")
    col1, col2 = st.columns([2, 1])
    with col1:
        st.plotly_chart(visualizer.create_chart(explorer.get_filtered_data(), 'cloud'), use_container_width=True)
    with col2:
        st.plotly_chart(visualizer.create_chart(explorer.class_histogram(), 'histogram', {'orientation': 'h'}),
                        use_container_width=True)

    st.dataframe(explorer.get_filtered_data().head(10))
    st.text(f"Puntos: {len(cloud)} | Clases: {len(histogram)}")
    with st.expander("📋 Resumen estadístico", expanded=False):
        st.dataframe(explorer.get_summary_stats())
